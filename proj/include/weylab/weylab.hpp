#pragma once

#include <weylab/equidist.hpp>
#include <weylab/error.hpp>
#include <weylab/exponents.hpp>
#include <weylab/mod1.hpp>
#include <weylab/parallel.hpp>
#include <weylab/phase.hpp>
#include <weylab/random.hpp>
#include <weylab/scaling.hpp>
#include <weylab/sup_search.hpp>
#include <weylab/vinogradov.hpp>
