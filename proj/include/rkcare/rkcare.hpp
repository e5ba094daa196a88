#pragma once

#include "rkcare/brad.hpp"
#include "rkcare/compare.hpp"
#include "rkcare/dense_care.hpp"
#include "rkcare/errors.hpp"
#include "rkcare/kernels.hpp"
#include "rkcare/matrix_market.hpp"
#include "rkcare/problem.hpp"
#include "rkcare/projector.hpp"
#include "rkcare/report.hpp"
#include "rkcare/residual.hpp"
#include "rkcare/shifts.hpp"
#include "rkcare/truncation.hpp"
#include "rkcare/types.hpp"
