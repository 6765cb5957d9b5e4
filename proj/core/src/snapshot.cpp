#include "hylomorph/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hylomorph/errors.hpp"

namespace hylo {

namespace {

constexpr char kMagic[4] = {'H', 'Y', 'L', 'O'};

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t b[sizeof(T)];
  std::memcpy(b, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  template <class T>
  T get(const char* what) {
    if (remaining() < sizeof(T)) {
      std::ostringstream os;
      os << "truncated " << what << ": expected " << sizeof(T) << " bytes, got " << remaining();
      throw FormatError(pos_, os.str());
    }
    std::uint8_t b[sizeof(T)];
    std::memcpy(b, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint64_t> grid_counts(const Grid& g) {
  std::vector<std::uint64_t> c;
  for (int i = 0; i < g.dim(); ++i) c.push_back(static_cast<std::uint64_t>(g.shape()[i]));
  return c;
}

void check_grid(const Snapshot& s, const Grid& g) {
  if (s.dim != g.dim() || s.counts != grid_counts(g)) {
    throw GridMismatch("snapshot point counts do not match the configured grid");
  }
  if (s.lattice != g.lattice().row_major()) throw GridMismatch("snapshot lattice differs from the configured lattice");
}

std::ofstream or_fail(const std::filesystem::path& tmp) {
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& tmp, const std::filesystem::path& path) {
  out.close();
  if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  std::filesystem::rename(tmp, path);
}

}  // namespace

Snapshot make_snapshot(const Field& field) {
  Snapshot s;
  s.kind = SnapshotKind::ComplexField;
  s.dim = field.grid.dim();
  s.counts = grid_counts(field.grid);
  s.lattice = field.grid.lattice().row_major();
  s.psi = field.values;
  return s;
}

Snapshot make_real_snapshot(const Field& field) {
  for (const Complex& c : field.values) {
    if (c.imag() != 0.0) throw std::invalid_argument("make_real_snapshot: field has nonzero imaginary part");
  }
  Snapshot s = make_snapshot(field);
  s.kind = SnapshotKind::RealField;
  return s;
}

Snapshot make_snapshot(const NkgState& state) {
  require_same_grid(state.psi.grid, state.psi_dot.grid, "make_snapshot");
  Snapshot s = make_snapshot(state.psi);
  s.kind = SnapshotKind::NkgPair;
  s.psi_dot = state.psi_dot.values;
  return s;
}

std::vector<std::uint8_t> encode_snapshot(const Snapshot& s) {
  if (s.dim < 1 || s.dim > kMaxDim) throw std::invalid_argument("encode_snapshot: bad dim");
  if (s.counts.size() != static_cast<std::size_t>(s.dim) ||
      s.lattice.size() != static_cast<std::size_t>(s.dim * s.dim)) {
    throw std::invalid_argument("encode_snapshot: header sizes inconsistent with dim");
  }
  std::size_t points = 1;
  for (std::uint64_t c : s.counts) points *= c;
  if (s.psi.size() != points || (s.kind == SnapshotKind::NkgPair && s.psi_dot.size() != points)) {
    throw std::invalid_argument("encode_snapshot: payload length does not match the point counts");
  }
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put(out, kSnapshotVersion);
  put(out, static_cast<std::uint8_t>(s.kind));
  put(out, static_cast<std::uint8_t>(s.dim));
  for (std::uint64_t c : s.counts) put(out, c);
  for (double a : s.lattice) put(out, a);
  for (const Complex& c : s.psi) {
    put(out, c.real());
    if (s.kind != SnapshotKind::RealField) put(out, c.imag());
  }
  if (s.kind == SnapshotKind::NkgPair) {
    for (const Complex& c : s.psi_dot) {
      put(out, c.real());
      put(out, c.imag());
    }
  }
  return out;
}

Snapshot decode_snapshot(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError(0, "bad magic, expected \"HYLO\"");
  Reader r(bytes.subspan(4));
  auto at = [&] { return 4 + r.offset(); };
  const std::size_t version_at = at();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kSnapshotVersion) {
    throw FormatError(version_at, "unsupported version " + std::to_string(version));
  }
  const std::size_t kind_at = at();
  const auto kind = r.get<std::uint8_t>("kind");
  if (kind > 2) throw FormatError(kind_at, "unknown kind " + std::to_string(kind));
  const std::size_t dim_at = at();
  const auto dim = r.get<std::uint8_t>("dim");
  if (dim < 1 || dim > kMaxDim) throw FormatError(dim_at, "dim must be 1..3, got " + std::to_string(dim));

  Snapshot s;
  s.kind = static_cast<SnapshotKind>(kind);
  s.dim = dim;
  std::uint64_t points = 1;
  for (int i = 0; i < dim; ++i) {
    const std::size_t count_at = at();
    const auto c = r.get<std::uint64_t>("point count");
    if (c == 0 || c > (std::uint64_t{1} << 32) || points * c > (std::uint64_t{1} << 34)) {
      throw FormatError(count_at, "implausible point count " + std::to_string(c));
    }
    points *= c;
    s.counts.push_back(c);
  }
  for (int i = 0; i < dim * dim; ++i) s.lattice.push_back(r.get<double>("lattice matrix"));

  const std::uint64_t per_point = s.kind == SnapshotKind::RealField ? 1 : (s.kind == SnapshotKind::ComplexField ? 2 : 4);
  const std::uint64_t expected = points * per_point * sizeof(double);
  if (r.remaining() != expected) {
    std::ostringstream os;
    os << (r.remaining() < expected ? "truncated payload" : "trailing bytes after payload") << ": expected "
       << expected << " bytes, got " << r.remaining();
    throw FormatError(at(), os.str());
  }
  s.psi.resize(points);
  for (auto& c : s.psi) {
    const double re = r.get<double>("payload");
    const double im = s.kind == SnapshotKind::RealField ? 0.0 : r.get<double>("payload");
    c = Complex(re, im);
  }
  if (s.kind == SnapshotKind::NkgPair) {
    s.psi_dot.resize(points);
    for (auto& c : s.psi_dot) {
      const double re = r.get<double>("payload");
      c = Complex(re, r.get<double>("payload"));
    }
  }
  return s;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  std::ofstream out = or_fail(tmp);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  finish(out, tmp, path);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  std::ofstream out = or_fail(tmp);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  finish(out, tmp, path);
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  write_file_atomic(path, encode_snapshot(snap));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

Field snapshot_field(const Snapshot& snap, const Grid& grid) {
  if (snap.kind == SnapshotKind::NkgPair) throw std::invalid_argument("snapshot holds an NKG pair, not a field");
  check_grid(snap, grid);
  return Field(grid, snap.psi);
}

NkgState snapshot_state(const Snapshot& snap, const Grid& grid) {
  if (snap.kind != SnapshotKind::NkgPair) throw std::invalid_argument("snapshot holds a single field, not an NKG pair");
  check_grid(snap, grid);
  return NkgState(Field(grid, snap.psi), Field(grid, snap.psi_dot));
}

}  // namespace hylo
