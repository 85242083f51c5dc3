#ifndef MEGALIGN_COMMON_HPP
#define MEGALIGN_COMMON_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace megalign {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

namespace fs = std::filesystem;

/// Malformed or inconsistent input data. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numeric procedure could not produce a finite answer. Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad invocation or configuration. Maps to CLI exit code 1.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Matrix &m) { return m.allFinite(); }

// FNV-1a 64; stable across platforms, used to key RNG streams.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix_key(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffU;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministic RNG stream keyed on a seed plus any number of string/integer labels.
class KeyedRng {
public:
  explicit KeyedRng(std::uint64_t seed) : key_(mix_key(0xcbf29ce484222325ULL, seed)) {}

  KeyedRng &with(std::string_view label) {
    key_ = fnv1a(label, mix_key(key_, label.size()));
    return *this;
  }
  KeyedRng &with(std::uint64_t label) {
    key_ = mix_key(key_, label);
    return *this;
  }

  std::mt19937_64 engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)};
    return std::mt19937_64(seq);
  }

private:
  std::uint64_t key_;
};

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64 &gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64 &gen, std::size_t n) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

/// Fisher-Yates with uniform_index, so shuffles do not depend on the standard library's
/// std::shuffle implementation.
template <typename T>
void keyed_shuffle(std::vector<T> &v, std::mt19937_64 &gen) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[uniform_index(gen, i)]);
}

inline Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &gen) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = nd(gen);
  return m;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index writes only its own
/// output slot, so results never depend on the worker count.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads)
          fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto &th : pool)
    th.join();
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Raw IEEE-754 binary32 little-endian row-major payloads.

namespace detail {
inline std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little)
    return v;
  else
    return ((v & 0xffU) << 24) | ((v & 0xff00U) << 8) | ((v >> 8) & 0xff00U) | (v >> 24);
}
} // namespace detail

inline void write_f32le(const fs::path &path, const Matrix &m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw DataError("cannot open " + path.string() + " for writing");
  std::vector<std::uint32_t> buf(static_cast<std::size_t>(m.size()));
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      buf[k++] = detail::to_le(std::bit_cast<std::uint32_t>(static_cast<float>(m(i, j))));
  out.write(reinterpret_cast<const char *>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(std::uint32_t)));
  if (!out)
    throw DataError("short write to " + path.string());
}

inline Matrix read_f32le(const fs::path &path, Eigen::Index rows, Eigen::Index cols) {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec)
    throw DataError("cannot stat payload " + path.string());
  const auto expected = static_cast<std::uintmax_t>(rows) * static_cast<std::uintmax_t>(cols) * 4U;
  if (size != expected)
    throw DataError("payload " + path.string() + " has " + std::to_string(size) + " bytes, expected " +
                    std::to_string(expected) + " (" + std::to_string(rows) + "x" + std::to_string(cols) +
                    " f32)");
  std::ifstream in(path, std::ios::binary);
  std::vector<std::uint32_t> buf(static_cast<std::size_t>(rows * cols));
  in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(expected));
  if (!in)
    throw DataError("short read from " + path.string());
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = static_cast<double>(std::bit_cast<float>(detail::to_le(buf[k++])));
  if (!m.allFinite())
    throw DataError("payload " + path.string() + " contains non-finite values");
  return m;
}

} // namespace megalign

#endif // MEGALIGN_COMMON_HPP
