#pragma once

#include "morrey/checkers.hpp"
#include "morrey/constructions.hpp"
#include "morrey/density.hpp"
#include "morrey/functionals.hpp"
#include "morrey/geometry.hpp"
#include "morrey/mesh.hpp"
#include "morrey/report.hpp"
#include "morrey/scalar.hpp"
#include "morrey/suites.hpp"
#include "morrey/util.hpp"
#include "morrey/witness.hpp"
