// Umbrella header.
#pragma once

#include "kstab/examples.hpp"
#include "kstab/functionals.hpp"
#include "kstab/integration.hpp"
#include "kstab/linalg.hpp"
#include "kstab/oracle.hpp"
#include "kstab/pl_function.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"
#include "kstab/problem.hpp"
#include "kstab/rational.hpp"
#include "kstab/root_system.hpp"
