#pragma once

#include "analysis.hpp"
#include "coherence.hpp"
#include "config.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "inconsistency.hpp"
#include "lda.hpp"
#include "pipeline.hpp"
#include "stats.hpp"
