#pragma once

#include "fsmprint/conformance.hpp"
#include "fsmprint/dot.hpp"
#include "fsmprint/errors.hpp"
#include "fsmprint/fingerprint.hpp"
#include "fsmprint/incremental.hpp"
#include "fsmprint/learner.hpp"
#include "fsmprint/mealy.hpp"
#include "fsmprint/mutation.hpp"
#include "fsmprint/observation_tree.hpp"
#include "fsmprint/random.hpp"
#include "fsmprint/remote.hpp"
#include "fsmprint/separation.hpp"
#include "fsmprint/sul.hpp"
#include "fsmprint/synthetic.hpp"
#include "fsmprint/tls_toy.hpp"
#include "fsmprint/bench.hpp"
#include "fsmprint/report.hpp"
