#include "convser/errors.hpp"

#include <sstream>

namespace convser {

namespace {
std::string join_problems(const std::vector<std::string>& problems) {
  std::ostringstream out;
  out << "validation failed (" << problems.size() << " problem"
      << (problems.size() == 1 ? "" : "s") << ")";
  for (const auto& p : problems) out << "\n  " << p;
  return out.str();
}
}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

}  // namespace convser
