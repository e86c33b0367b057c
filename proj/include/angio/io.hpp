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

#ifndef ANGIO__IO_HPP
#define ANGIO__IO_HPP

#include <angio/labeling.hpp>
#include <angio/model.hpp>
#include <angio/phantom.hpp>
#include <angio/pipeline.hpp>
#include <angio/search.hpp>

#include <json.hpp>

#include <filesystem>
#include <span>
#include <vector>

// JSON documents exchanged by the command-line tool and the HTTP service.
// Positions are [z, y, x] in mm. Non-finite numbers are written as null.
// Readers throw ValidationError naming the offending field.

namespace angio::io {

using json = nlohmann::json;

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& doc);

json to_json(const Vec3& v);
Vec3 vec3_from_json(const json& j, const std::string& what);

//==============================================================================
/// {nodes:[{id,pos,degree,radius}], edges:[{id,a,b,polyline,arc_length,
/// min_radius,mean_radius}], components:[[ids]], main_component}
json to_json(const model::SkeletonGraph& g);
model::SkeletonGraph graph_from_json(const json& j);

//==============================================================================
json to_json(const phantom::PhantomSpec& spec);
phantom::PhantomSpec phantom_spec_from_json(const json& j);
json to_json(const phantom::PhantomGroundTruth& truth);
phantom::Occlusion occlusion_from_json(const json& j);

//==============================================================================
/// {vessel, markers:[{pos,max_dist}], required_present_count, slope_enabled,
/// slope_threshold}
json to_json(const labeling::MarkerChain& chain);
labeling::MarkerChain chain_from_json(const json& j);
json chains_to_json(std::span<const labeling::MarkerChain> chains);
/// Accepts an array of chains or {chains: [...]}.
std::vector<labeling::MarkerChain> chains_from_json(const json& j);

json to_json(const labeling::VesselVerdict& v);
json to_json(const labeling::LvoVerdict& v);
/// {verdicts:[...], lvo:{...}, present_count, vessel_count}
json labels_to_json(std::span<const labeling::VesselVerdict> verdicts, const labeling::LvoVerdict& lvo);

//==============================================================================
json to_json(const pipeline::PipelineConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
pipeline::PipelineConfig config_from_json(const json& j);

//==============================================================================
json to_json(const search::PathResult& p);
json to_json(const search::VisibleSet& v);
json to_json(const search::CacheStats& s);
json to_json(std::span<const search::ProximityHit> hits);
json to_json(std::span<const search::EdgeDirection> dirs);

} // namespace angio::io

#endif // ANGIO__IO_HPP
