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

#ifndef ANGIO__SERVICE_HPP
#define ANGIO__SERVICE_HPP

#include <angio/io.hpp>
#include <angio/labeling.hpp>
#include <angio/model.hpp>
#include <angio/search.hpp>

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace httplib { class Server; }

namespace angio::service {

//==============================================================================
/// One loaded vessel model with its search caches and labels. The model is
/// immutable once the session is published; caches are added under `_mutex`
/// and shared read-only.
class Session
{
public:
  /// `labels` is the document served by /labels (see io::labels_to_json).
  Session(std::string id, model::SkeletonGraph graph, std::optional<model::SurfaceMesh> mesh,
    std::optional<io::json> labels);

  const std::string& id() const { return _id; }
  const std::shared_ptr<const search::SearchGraph>& graph() const { return _graph; }
  /// Rendered once, so repeated GETs return identical bodies.
  const std::string& graph_json() const { return _graph_json; }
  const std::optional<std::string>& mesh_text() const { return _mesh_text; }
  const std::optional<io::json>& labels() const { return _labels; }

  /// Cached result for (root, criterion); builds it on first use.
  /// `built` reports whether this call ran the search.
  std::shared_ptr<const search::SearchCache> cache(int root, search::Criterion criterion,
    bool* built = nullptr);
  std::shared_ptr<const search::SearchCache> find_cache(int root, search::Criterion criterion) const;

  void set_active(std::shared_ptr<const search::SearchCache> cache);
  std::shared_ptr<const search::SearchCache> active() const;

  /// Node expansions summed over every search this session has run.
  std::size_t expansions_total() const { return _expansions.load(); }
  io::json stats() const;

private:
  std::string _id;
  std::shared_ptr<const search::SearchGraph> _graph;
  std::string _graph_json;
  std::optional<std::string> _mesh_text;
  std::optional<io::json> _labels;

  mutable std::mutex _mutex;
  std::mutex _build_mutex;
  std::map<std::pair<int, search::Criterion>, std::shared_ptr<const search::SearchCache>> _caches;
  std::shared_ptr<const search::SearchCache> _active;
  std::atomic<std::size_t> _expansions{0};
};

//==============================================================================
struct ServiceOptions
{
  /// When set, published sessions are written below it, and sessions found
  /// there are loaded at startup.
  std::optional<std::filesystem::path> model_dir;
};

/// The versioned (/v1) JSON API over in-memory sessions.
class Service
{
public:
  explicit Service(ServiceOptions options = {});

  /// Build a session from a creation request body (see README). Returns the
  /// new id. Throws ValidationError / StageError on bad input.
  std::string create_session(const io::json& request);
  std::shared_ptr<Session> find(const std::string& id) const;
  std::vector<std::string> session_ids() const;

  /// Install the /v1 routes on `server`.
  void bind(httplib::Server& server);

private:
  std::string publish(model::SkeletonGraph graph, std::optional<model::SurfaceMesh> mesh,
    std::optional<io::json> labels);
  void load_model_dir();

  ServiceOptions _options;
  mutable std::shared_mutex _mutex;
  std::map<std::string, std::shared_ptr<Session>> _sessions;
  std::size_t _next_id = 1;
};

} // namespace angio::service

#endif // ANGIO__SERVICE_HPP
