#pragma once

#include "convex.hpp"
#include "corpus.hpp"
#include "curves.hpp"
#include "error.hpp"
#include "formula_space.hpp"
#include "graph.hpp"
#include "lipschitz.hpp"
#include "metric_space.hpp"
#include "modulus.hpp"
#include "sobolev.hpp"
