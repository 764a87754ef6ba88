#pragma once

#include "gqw/harness/report.hpp"
#include "gqw/harness/suites.hpp"
#include "gqw/harness/system_spec.hpp"
