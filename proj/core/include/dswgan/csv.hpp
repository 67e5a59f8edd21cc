#pragma once

#include <string>

#include "dswgan/types.hpp"

namespace dswgan {

// Headerless CSV, one day per row, p integer columns. A leading header row
// is tolerated when its first cell is not numeric. Malformed input throws
// std::runtime_error naming the offending row/column (1-based).
// t_end <= 0 defaults the horizon to one-hour intervals (t_end = p).
CountMatrix load_counts_csv(const std::string& path, double t_end = 0.0);
void save_counts_csv(const std::string& path, const CountMatrix& m);

// One sorted column of arrival times.
EpochList load_epochs_csv(const std::string& path);
void save_epochs_csv(const std::string& path, const EpochList& epochs);

}  // namespace dswgan
