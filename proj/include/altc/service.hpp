#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "altc/active_learning.hpp"
#include "altc/corpus.hpp"
#include "altc/linear_model.hpp"
#include "altc/textprep.hpp"
#include "altc/tfidf.hpp"

namespace httplib {
class Server;
}

namespace altc {

struct SessionConfig {
  std::string id = "default";
  // Holds journal.jsonl; empty disables journaling.
  std::filesystem::path dir;
  AcquisitionConfig acq;
  TrainConfig train;
  PrepConfig prep;
  FeatureConfig features;
};

enum class SessionStatus { Training, AwaitingLabels, Done, Cancelled, Failed };

std::string_view to_string(SessionStatus s) noexcept;

struct ApiResponse {
  int status = 200;
  std::string body;
};

inline constexpr const char* kJournalFile = "journal.jsonl";

// A human-oracle active-learning session. run_loop executes on a worker
// thread; its oracle blocks until every document of the pending batch has a
// label. Readers see the state as of the last completed retrain.
//
// Accepted labels are appended to the journal before they are acknowledged.
// On construction the journal is replayed, and any replayed label is filled
// in as soon as its document is selected again. Selection is deterministic,
// so a restarted session walks through the same batches.
class AnnotationSession {
 public:
  AnnotationSession(LabelSchema schema, std::vector<LabeledDocument> seed,
                    std::vector<Document> pool, std::vector<LabeledDocument> eval,
                    SessionConfig cfg);
  ~AnnotationSession();

  AnnotationSession(const AnnotationSession&) = delete;
  AnnotationSession& operator=(const AnnotationSession&) = delete;

  void start();
  // Unblocks the worker with SessionCancelled and joins it.
  void cancel();

  // Waits while the session is training, up to `timeout`.
  SessionStatus wait_ready(std::chrono::milliseconds timeout) const;
  SessionStatus status() const;
  std::size_t iteration() const;

  ApiResponse get_session() const;
  ApiResponse get_batch() const;
  ApiResponse get_metrics() const;
  ApiResponse get_export() const;
  // Body: {"<id>": label, ...} or {"labels": {...}}, label given by class
  // name or index. All entries are validated before any is stored.
  ApiResponse post_labels(std::string_view body);
  ApiResponse post_commit();

  const LabelSchema& schema() const noexcept { return schema_; }
  const TextFeaturizer& featurizer() const noexcept { return featurizer_; }
  // The model that scored the current batch.
  OvrLinearModel model() const;
  std::size_t replayed_labels() const noexcept { return replay_.size(); }

 private:
  class Oracle;

  std::vector<LabeledDocument> await_labels(std::span<const Candidate> batch);
  void run();
  void load_journal();
  void append_journal(const std::string& id, std::size_t label);

  LabelSchema schema_;
  SessionConfig cfg_;
  TextFeaturizer featurizer_;
  ActiveLearningState initial_;
  std::vector<LabeledDocument> eval_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  SessionStatus status_ = SessionStatus::Training;
  std::string failure_;
  bool cancelled_ = false;
  std::size_t t_ = 0;
  std::vector<Candidate> pending_;
  std::unordered_map<std::string, std::size_t> received_;
  std::vector<IterationRecord> history_;
  std::vector<LabeledDocument> labeled_;
  std::size_t pool_size_ = 0;
  OvrLinearModel model_;
  std::unordered_map<std::string, std::size_t> replay_;
  std::ofstream journal_;
  std::thread worker_;
};

// GET /session, /batch, /metrics, /export; POST /labels, /commit. GET /batch
// accepts ?wait_ms=N to wait out a retrain. `static_dir` is served at / when
// nonempty.
void mount_routes(httplib::Server& server, AnnotationSession& session,
                  const std::filesystem::path& static_dir = {});

}  // namespace altc
