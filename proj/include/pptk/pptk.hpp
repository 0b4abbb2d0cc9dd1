#pragma once

#include "pptk/bipartition.hpp"
#include "pptk/criteria.hpp"
#include "pptk/errors.hpp"
#include "pptk/multipartite.hpp"
#include "pptk/product_search.hpp"
#include "pptk/sweeps.hpp"
#include "pptk/states.hpp"
#include "pptk/tensor.hpp"
#include "pptk/witnesses.hpp"
