#pragma once

#include "csv.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "imaging.hpp"
#include "latent.hpp"
#include "metrics.hpp"
#include "morph.hpp"
#include "predicates.hpp"
#include "protocol.hpp"
#include "scoring.hpp"
