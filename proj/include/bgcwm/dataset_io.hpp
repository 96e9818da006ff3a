#ifndef BGCWM_DATASET_IO_HPP
#define BGCWM_DATASET_IO_HPP

#include <string>

#include "bgcwm/model.hpp"

namespace bgcwm {

// CSV with a header row. The column named `y` is the response, an optional
// `label` column holds integer ground-truth classes and every other column is
// a covariate, in file order.
Dataset read_dataset_csv(const std::string& path);

void write_dataset_csv(const std::string& path, const Dataset& data);

}  // namespace bgcwm

#endif  // BGCWM_DATASET_IO_HPP
