#ifndef SUPPSIZE_SUPPSIZE_HPP
#define SUPPSIZE_SUPPSIZE_HPP

#include "suppsize/chebyshev.hpp"
#include "suppsize/distribution.hpp"
#include "suppsize/estimator.hpp"
#include "suppsize/functions.hpp"
#include "suppsize/histogram.hpp"
#include "suppsize/io.hpp"
#include "suppsize/params.hpp"
#include "suppsize/plot_data.hpp"
#include "suppsize/random.hpp"
#include "suppsize/rational.hpp"
#include "suppsize/sampler.hpp"
#include "suppsize/simulate.hpp"
#include "suppsize/tester.hpp"
#include "suppsize/verify.hpp"

#endif  // SUPPSIZE_SUPPSIZE_HPP
