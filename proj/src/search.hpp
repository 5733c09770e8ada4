#ifndef POLYMG_SRC_SEARCH_HPP
#define POLYMG_SRC_SEARCH_HPP

#include "polymg/symbol.hpp"

#include <functional>

namespace polymg::detail
{

/// Compass (coordinate pattern) search maximizing `objective` starting at `start`.
/// Candidate points are passed through `project`, which returns false for
/// infeasible points. Step is halved whenever no axis move improves; the search
/// also stops after `max_evaluations` objective calls (ridges make it crawl).
inline Frequency compass_maximize(const std::function<double(const Frequency &)> &objective,
                                  Frequency start, double initial_step, double final_step,
                                  const std::function<bool(Frequency &)> &project,
                                  double *best_value = nullptr, int max_evaluations = 2000)
{
  double best = objective(start);
  int evaluations = 1;
  double step = initial_step;
  while (step > final_step && evaluations < max_evaluations)
  {
    bool improved = false;
    for (int a = 0; a < start.dim; ++a)
      for (double sign : {-1.0, 1.0})
      {
        Frequency trial = start;
        trial[a] += sign * step;
        if (!project(trial))
          continue;
        const double v = objective(trial);
        ++evaluations;
        if (v > best)
        {
          best = v;
          start = trial;
          improved = true;
        }
      }
    if (!improved)
      step *= 0.5;
  }
  if (best_value)
    *best_value = best;
  return start;
}

} // namespace polymg::detail

#endif
