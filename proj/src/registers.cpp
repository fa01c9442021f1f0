#include "qpaec/registers.hpp"

#include <stdexcept>

namespace qpaec {

RegisterLayout::RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    // dim 1 is allowed for trivial ancillas (e.g. purifying a pure state).
    if (regs_[i].dim < 1) throw std::invalid_argument("RegisterLayout: dims must be >= 1");
    if (regs_[i].name.empty()) throw std::invalid_argument("RegisterLayout: empty name");
    for (std::size_t j = i + 1; j < regs_.size(); ++j) {
      if (regs_[i].name == regs_[j].name) {
        throw std::invalid_argument("RegisterLayout: duplicate register name '" +
                                    regs_[i].name + "'");
      }
    }
  }
  rebuild();
}

void RegisterLayout::rebuild() {
  strides_.assign(regs_.size(), 1);
  total_dim_ = 1;
  for (std::size_t i = regs_.size(); i-- > 0;) {
    strides_[i] = total_dim_;
    total_dim_ *= regs_[i].dim;
  }
}

bool RegisterLayout::has(const std::string& name) const {
  for (const auto& r : regs_)
    if (r.name == name) return true;
  return false;
}

std::size_t RegisterLayout::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < regs_.size(); ++i)
    if (regs_[i].name == name) return i;
  throw std::invalid_argument("RegisterLayout: unknown register '" + name + "'");
}

std::size_t RegisterLayout::dim_of(const std::string& name) const {
  return regs_[index_of(name)].dim;
}

std::size_t RegisterLayout::qubits_of(const std::string& name) const {
  std::size_t d = dim_of(name);
  std::size_t q = 0;
  while ((std::size_t{1} << q) < d) ++q;
  if ((std::size_t{1} << q) != d) {
    throw std::invalid_argument("register '" + name + "' does not have qubit-power dimension");
  }
  return q;
}

std::vector<std::size_t> RegisterLayout::split(std::size_t flat) const {
  std::vector<std::size_t> digits(regs_.size());
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    digits[i] = (flat / strides_[i]) % regs_[i].dim;
  }
  return digits;
}

std::size_t RegisterLayout::join(const std::vector<std::size_t>& digits) const {
  if (digits.size() != regs_.size()) throw std::invalid_argument("join: digit count mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    if (digits[i] >= regs_[i].dim) throw std::out_of_range("join: digit out of range");
    flat += digits[i] * strides_[i];
  }
  return flat;
}

std::size_t RegisterLayout::digit(std::size_t flat, std::size_t reg_index) const {
  return (flat / strides_.at(reg_index)) % regs_[reg_index].dim;
}

std::size_t RegisterLayout::with_digit(std::size_t flat, std::size_t reg_index,
                                       std::size_t d) const {
  std::size_t old = digit(flat, reg_index);
  return flat + (d - old) * strides_[reg_index];
}

RegisterLayout RegisterLayout::appended(const Register& reg) const {
  std::vector<Register> regs = regs_;
  regs.push_back(reg);
  return RegisterLayout(std::move(regs));
}

RegisterLayout RegisterLayout::removed(const std::vector<std::string>& names) const {
  for (const auto& n : names) index_of(n);  // validate
  std::vector<Register> regs;
  for (const auto& r : regs_) {
    bool drop = false;
    for (const auto& n : names) drop = drop || (r.name == n);
    if (!drop) regs.push_back(r);
  }
  if (regs.empty()) throw std::invalid_argument("removed: cannot drop every register");
  return RegisterLayout(std::move(regs));
}

RegisterLayout RegisterLayout::replaced(const std::string& name, const Register& reg) const {
  std::vector<Register> regs = regs_;
  regs[index_of(name)] = reg;
  return RegisterLayout(std::move(regs));
}

}  // namespace qpaec
