#pragma once

// Nonlocal interface FEM: unfitted cut elements for 1D multi-horizon
// diffusion with jump-coupled fields.

#include "nlifem/common.hpp"
#include "nlifem/field.hpp"
#include "nlifem/kernel.hpp"
#include "nlifem/regions.hpp"
#include "nlifem/mesh.hpp"
#include "nlifem/quadrature.hpp"
#include "nlifem/dofmap.hpp"
#include "nlifem/operators.hpp"
#include "nlifem/examples.hpp"
#include "nlifem/assembly.hpp"
#include "nlifem/norms.hpp"
#include "nlifem/studies.hpp"
#include "nlifem/report.hpp"
#include "nlifem/expr.hpp"
#include "nlifem/config.hpp"
