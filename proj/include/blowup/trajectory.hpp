#ifndef BLOWUP_TRAJECTORY_HPP
#define BLOWUP_TRAJECTORY_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "blowup/util/mat2.hpp"

namespace blowup {

// A sampled solution curve. For desingularized runs `states` holds (u,v) and
// `rho` the accumulated original time; for original-coordinates runs `states`
// holds (x,y) and `rho` stays empty.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec2> states;
    std::vector<double> rho;

    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    double max_error_estimate = 0.0;
    bool axis_flag = false;  // terminated by an approach to {u=0}

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
};

}  // namespace blowup

#endif
