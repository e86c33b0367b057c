/*
 * Copyright (C) 2026 The angiograph authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/

#include <angio/core/vvol.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace angio::vvol {

namespace {

//==============================================================================
template<typename T>
T to_little_endian(T v)
{
  if constexpr (std::endian::native == std::endian::big)
  {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

void write_header(std::ostream& out, const Geometry& g, DType dtype)
{
  std::ostringstream h;
  h.precision(17);
  h << "dims " << g.dims.z << ' ' << g.dims.y << ' ' << g.dims.x << '\n';
  h << "spacing " << g.spacing.z << ' ' << g.spacing.y << ' ' << g.spacing.x << '\n';
  h << "origin " << g.origin.z << ' ' << g.origin.y << ' ' << g.origin.x << '\n';
  h << "dtype " << (dtype == DType::int16 ? "int16" : "float32") << '\n';
  h << '\n';
  out << h.str();
}

template<typename T, typename Src>
void write_samples(std::ostream& out, std::span<const Src> data)
{
  std::vector<T> buffer(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
  {
    T v;
    if constexpr (std::is_same_v<T, std::int16_t>)
    {
      const double r = std::round(static_cast<double>(data[i]));
      v = static_cast<std::int16_t>(std::clamp(r, -32768.0, 32767.0));
    }
    else
      v = static_cast<T>(data[i]);
    buffer[i] = to_little_endian(v);
  }
  out.write(reinterpret_cast<const char*>(buffer.data()),
    static_cast<std::streamsize>(buffer.size() * sizeof(T)));
  if (!out)
    throw Error("vvol: write failed");
}

[[noreturn]] void header_error(int line, const std::string& msg)
{
  throw ValidationError("header line " + std::to_string(line) + ": " + msg);
}

template<typename T>
void parse_triple(const std::string& text, int line, const char* key, T& a, T& b, T& c)
{
  std::istringstream s(text);
  std::string k;
  if (!(s >> k) || k != key)
    header_error(line, std::string("expected '") + key + " z y x', got '" + text + "'");
  if (!(s >> a >> b >> c))
    header_error(line, std::string("expected three values after '") + key + "'");
  std::string rest;
  if (s >> rest)
    header_error(line, std::string("trailing characters after '") + key + "' values");
}

struct Header
{
  Geometry geometry;
  DType dtype = DType::float32;
};

Header read_header(std::istream& in)
{
  Header h;
  std::string line;
  auto next = [&](int n) -> std::string&
  {
    if (!std::getline(in, line))
      header_error(n, "unexpected end of file");
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    return line;
  };

  parse_triple(next(1), 1, "dims", h.geometry.dims.z, h.geometry.dims.y, h.geometry.dims.x);
  if (h.geometry.dims.z <= 0 || h.geometry.dims.y <= 0 || h.geometry.dims.x <= 0)
    header_error(1, "dims must be positive");

  parse_triple(next(2), 2, "spacing",
    h.geometry.spacing.z, h.geometry.spacing.y, h.geometry.spacing.x);
  if (!(h.geometry.spacing.z > 0 && h.geometry.spacing.y > 0 && h.geometry.spacing.x > 0))
    header_error(2, "spacing components must be > 0");

  parse_triple(next(3), 3, "origin",
    h.geometry.origin.z, h.geometry.origin.y, h.geometry.origin.x);

  {
    std::istringstream s(next(4));
    std::string k, t, rest;
    if (!(s >> k) || k != "dtype")
      header_error(4, "expected 'dtype int16|float32', got '" + line + "'");
    if (!(s >> t) || (t != "int16" && t != "float32") || (s >> rest))
      header_error(4, "dtype must be int16 or float32");
    h.dtype = t == "int16" ? DType::int16 : DType::float32;
  }

  if (!next(5).empty())
    header_error(5, "expected blank line terminating the header");

  return h;
}

template<typename T>
std::vector<T> read_samples(std::istream& in, std::size_t n)
{
  std::vector<T> buffer(n);
  in.read(reinterpret_cast<char*>(buffer.data()),
    static_cast<std::streamsize>(n * sizeof(T)));
  if (static_cast<std::size_t>(in.gcount()) != n * sizeof(T))
    throw ValidationError("vvol: voxel data truncated (expected "
      + std::to_string(n * sizeof(T)) + " bytes)");
  for (auto& v : buffer)
    v = to_little_endian(v);
  return buffer;
}

std::ifstream open_in(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("vvol: cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("vvol: cannot create " + path.string());
  return out;
}

} // anonymous namespace

//==============================================================================
void write(std::ostream& out, const Volume& v, DType dtype)
{
  write_header(out, v.geometry(), dtype);
  if (dtype == DType::int16)
    write_samples<std::int16_t>(out, v.data());
  else
    write_samples<float>(out, v.data());
}

//==============================================================================
void write(std::ostream& out, const BinaryMask& m)
{
  write_header(out, m.geometry(), DType::int16);
  write_samples<std::int16_t>(out, m.data());
}

void write(const std::filesystem::path& path, const Volume& v, DType dtype)
{
  auto out = open_out(path);
  write(out, v, dtype);
}

void write(const std::filesystem::path& path, const BinaryMask& m)
{
  auto out = open_out(path);
  write(out, m);
}

//==============================================================================
Volume read_volume(std::istream& in)
{
  const Header h = read_header(in);
  const std::size_t n = h.geometry.dims.count();
  std::vector<float> data(n);
  if (h.dtype == DType::int16)
  {
    const auto raw = read_samples<std::int16_t>(in, n);
    for (std::size_t i = 0; i < n; ++i)
      data[i] = static_cast<float>(raw[i]);
  }
  else
    data = read_samples<float>(in, n);
  return Volume(h.geometry, std::move(data));
}

Volume read_volume(const std::filesystem::path& path)
{
  auto in = open_in(path);
  return read_volume(in);
}

//==============================================================================
BinaryMask read_mask(std::istream& in)
{
  const Volume v = read_volume(in);
  BinaryMask m(v.geometry());
  for (std::size_t i = 0; i < v.size(); ++i)
    m[i] = v[i] != 0.0f;
  return m;
}

BinaryMask read_mask(const std::filesystem::path& path)
{
  auto in = open_in(path);
  return read_mask(in);
}

} // namespace angio::vvol
