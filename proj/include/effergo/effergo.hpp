#pragma once

#include "effergo/errors.hpp"
#include "effergo/rational.hpp"
#include "effergo/word.hpp"
#include "effergo/clopen.hpp"
#include "effergo/measure.hpp"
#include "effergo/point.hpp"
#include "effergo/reals.hpp"
#include "effergo/effopen.hpp"
#include "effergo/budget.hpp"
#include "effergo/transforms.hpp"
#include "effergo/covers.hpp"
#include "effergo/birkhoff.hpp"
#include "effergo/lambalgen.hpp"
#include "effergo/json_io.hpp"
