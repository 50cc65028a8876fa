#pragma once

#include "kornlab/core.hpp"
#include "kornlab/domain.hpp"
#include "kornlab/experiment.hpp"
#include "kornlab/extension.hpp"
#include "kornlab/field.hpp"
#include "kornlab/jacobian.hpp"
#include "kornlab/korn.hpp"
#include "kornlab/nelder_mead.hpp"
#include "kornlab/nonlocal.hpp"
#include "kornlab/profile.hpp"
#include "kornlab/quadrature.hpp"
#include "kornlab/reduce.hpp"
#include "kornlab/report.hpp"
#include "kornlab/rng.hpp"
#include "kornlab/seminorm.hpp"
#include "kornlab/version.hpp"
