#pragma once

#include <string>

#include "mvplc/simulate.hpp"

namespace mvplc {

// CSV with header
// step,vehicle,t,x,y,psi,xhat,yhat,psihat,sx3,sy3,spsi3,n_lm
std::string trace_to_csv(const SimTrace& trace);

// Trajectory plot (true and estimated paths, targets, placed landmarks)
// above per-vehicle error plots with their 3 sigma bands.
std::string trace_to_svg(const Instance& instance, const Solution& solution, const SimTrace& trace);

}  // namespace mvplc
