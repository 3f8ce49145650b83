#pragma once

#include "lscut/analysis.hpp"
#include "lscut/cut_graph.hpp"
#include "lscut/errors.hpp"
#include "lscut/imaging.hpp"
#include "lscut/label_codec.hpp"
#include "lscut/ls_systems.hpp"
#include "lscut/maxflow.hpp"
#include "lscut/mrf_model.hpp"
#include "lscut/oracle.hpp"
#include "lscut/pgm.hpp"
#include "lscut/problem_io.hpp"
#include "lscut/solver.hpp"
