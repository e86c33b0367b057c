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

#include <angio/pipeline.hpp>

#include <exception>
#include <string>

namespace angio::pipeline {

namespace {

template <class F>
auto stage(const char* tag, F&& f)
{
  try
  {
    return f();
  }
  catch (const StageError&)
  {
    throw;
  }
  catch (const std::exception& e)
  {
    throw StageError(tag, e.what());
  }
}

} // anonymous namespace

PipelineResult run_pipeline(const Volume& v, const Volume& atlas_prob, const PipelineConfig& cfg)
{
  stage("d", [&]
  {
    require_same_geometry(v.geometry(), atlas_prob.geometry(), "atlas");
    return 0;
  });

  const Volume resp = stage("d", [&]
  {
    return frangi_vesselness(v, cfg.frangi_scales,
      {cfg.frangi_alpha, cfg.frangi_beta, 0.0});
  });

  const BinaryMask atlas = stage("e", [&]
  {
    return build_atlas_mask(atlas_prob, cfg.atlas_t1, cfg.atlas_dilation);
  });

  const Volume gated = stage("e", [&]
  {
    return gate_and_threshold(resp, atlas, cfg.t2);
  });

  PipelineResult out{BinaryMask(v.geometry()), BinaryMask(v.geometry()), {}};
  // Detection (f) and masking of the centres (g) run together.
  out.seeds = stage("f", [&] { return hough_seed_points(gated, cfg.hough); });

  out.stage_h = stage("h", [&]
  {
    return region_grow_adaptive(v, out.seeds, cfg.region_tolerance, &atlas);
  });

  out.final_mask = stage("i", [&]
  {
    const BinaryMask grown = region_grow_window(v, out.stage_h, cfg.window_lo, cfg.window_hi);
    return morphological_closing(grown, cfg.closing_radius);
  });
  return out;
}

} // namespace angio::pipeline
