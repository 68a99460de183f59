#pragma once

#include "rbeam/certificates.hpp"
#include "rbeam/dynamics.hpp"
#include "rbeam/error.hpp"
#include "rbeam/functionals.hpp"
#include "rbeam/mesh.hpp"
#include "rbeam/quadrature.hpp"
#include "rbeam/runner.hpp"
#include "rbeam/triggering.hpp"
