#pragma once

#include "gqw/cas/calculus.hpp"
#include "gqw/cas/eval.hpp"
#include "gqw/cas/expr.hpp"
#include "gqw/cas/parser.hpp"
#include "gqw/cas/rational.hpp"
#include "gqw/cas/sampler.hpp"
