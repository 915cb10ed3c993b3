#pragma once

#include <functional>

namespace fnn {

struct ProgressEvent {
  enum class Kind {
    integrals,  // one covariate's integral features: index = covariate (1-based)
    fold_done,  // cross-validation fold finished: index = fold (1-based)
    tune,       // tuning candidates finished so far: index of total
  };
  Kind kind;
  int index = 0;
  int total = 0;
  double fraction = 0.0;  // progress within the current item, in [0, 1]
};

/// Progress callbacks may be invoked from worker threads; the callee is
/// responsible for its own synchronization.
using ProgressFn = std::function<void(const ProgressEvent&)>;

inline void emit(const ProgressFn& fn, const ProgressEvent& ev) {
  if (fn) fn(ev);
}

}  // namespace fnn
