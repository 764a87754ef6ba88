#pragma once

#include "gqw/exterior/chart.hpp"
#include "gqw/exterior/flow.hpp"
#include "gqw/exterior/form_parser.hpp"
#include "gqw/exterior/tensors.hpp"
