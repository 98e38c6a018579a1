#pragma once

#include "circica/charutil.hpp"
#include "circica/cnormal.hpp"
#include "circica/core.hpp"
#include "circica/csv.hpp"
#include "circica/ica_model.hpp"
#include "circica/isoreal.hpp"
#include "circica/moments.hpp"
#include "circica/random.hpp"
#include "circica/sources.hpp"
#include "circica/sut.hpp"
#include "circica/takagi.hpp"
