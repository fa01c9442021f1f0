#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qpaec {

struct Register {
  std::string name;
  std::size_t dim = 0;

  friend bool operator==(const Register&, const Register&) = default;
};

/// Ordered list of named registers making up a tensor product space.
/// Register 0 is the most significant factor of the flat index.
class RegisterLayout {
public:
  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<Register> regs);

  std::size_t count() const { return regs_.size(); }
  std::size_t total_dim() const { return total_dim_; }
  const Register& at(std::size_t i) const { return regs_.at(i); }
  const std::vector<Register>& registers() const { return regs_; }

  bool has(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
  std::size_t dim_of(const std::string& name) const;
  /// Number of qubits if the register dimension is a power of two; throws
  /// otherwise.
  std::size_t qubits_of(const std::string& name) const;

  /// Flat index -> per-register digits and back.
  std::vector<std::size_t> split(std::size_t flat) const;
  std::size_t join(const std::vector<std::size_t>& digits) const;

  /// Digit of one register inside a flat index.
  std::size_t digit(std::size_t flat, std::size_t reg_index) const;
  /// Flat index with one register's digit replaced.
  std::size_t with_digit(std::size_t flat, std::size_t reg_index, std::size_t digit) const;

  RegisterLayout appended(const Register& reg) const;
  RegisterLayout removed(const std::vector<std::string>& names) const;
  RegisterLayout replaced(const std::string& name, const Register& reg) const;

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;

private:
  std::vector<Register> regs_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 1;

  void rebuild();
};

}  // namespace qpaec
