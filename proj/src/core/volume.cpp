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

#include <angio/core/volume.hpp>

#include <deque>
#include <numeric>

namespace angio {

//==============================================================================
std::size_t count_set(const BinaryMask& m)
{
  std::size_t n = 0;
  for (const auto v : m.data())
    n += v != 0;
  return n;
}

//==============================================================================
double dice(const BinaryMask& a, const BinaryMask& b)
{
  if (!(a.dims() == b.dims()))
    throw ValidationError("dice: dims mismatch");

  std::size_t inter = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    const bool x = a[i] != 0;
    const bool y = b[i] != 0;
    na += x;
    nb += y;
    inter += x && y;
  }
  if (na + nb == 0)
    return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

//==============================================================================
bool is_subset(const BinaryMask& inner, const BinaryMask& outer)
{
  if (!(inner.dims() == outer.dims()))
    throw ValidationError("is_subset: dims mismatch");
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (inner[i] && !outer[i])
      return false;
  return true;
}

//==============================================================================
std::size_t label_components(const BinaryMask& m, std::vector<std::uint32_t>& labels)
{
  const Dims& d = m.dims();
  labels.assign(m.size(), 0);
  std::uint32_t next = 0;
  std::deque<std::size_t> queue;

  for (std::size_t start = 0; start < m.size(); ++start)
  {
    if (!m[start] || labels[start])
      continue;

    labels[start] = ++next;
    queue.push_back(start);
    while (!queue.empty())
    {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const Index3 c = d.unravel(cur);
      for (const auto& o : neighbours26())
      {
        const Index3 n{c.z + o[0], c.y + o[1], c.x + o[2]};
        if (!d.contains(n))
          continue;
        const std::size_t ni = d.linear(n);
        if (m[ni] && !labels[ni])
        {
          labels[ni] = next;
          queue.push_back(ni);
        }
      }
    }
  }
  return next;
}

//==============================================================================
std::size_t count_components(const BinaryMask& m)
{
  std::vector<std::uint32_t> labels;
  return label_components(m, labels);
}

} // namespace angio
