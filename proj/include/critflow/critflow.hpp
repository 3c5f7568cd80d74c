#pragma once

#include "critflow/config.hpp"
#include "critflow/decay.hpp"
#include "critflow/duhamel.hpp"
#include "critflow/fft.hpp"
#include "critflow/field.hpp"
#include "critflow/grid.hpp"
#include "critflow/initial_data.hpp"
#include "critflow/lemmas.hpp"
#include "critflow/norms.hpp"
#include "critflow/pipeline.hpp"
#include "critflow/property_sweep.hpp"
#include "critflow/snapshot_io.hpp"
#include "critflow/solver.hpp"
#include "critflow/spectral_ops.hpp"
#include "critflow/surrogate.hpp"
#include "critflow/time_norms.hpp"
#include "critflow/wellposed.hpp"
