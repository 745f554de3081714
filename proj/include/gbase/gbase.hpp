#pragma once

#include "base.hpp"
#include "bigint.hpp"
#include "digits.hpp"
#include "empirical.hpp"
#include "error.hpp"
#include "gfun.hpp"
#include "parallel.hpp"
#include "poly.hpp"
#include "series.hpp"
#include "transform.hpp"
