#include "altc/service.hpp"

#include <algorithm>
#include <charconv>

#include "altc/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace altc {
namespace {

using ojson = nlohmann::ordered_json;

ApiResponse ok(const ojson& body) { return {200, body.dump()}; }

ApiResponse fail(int status, ErrorCode code, const std::string& message,
                 const std::string& subject = {}) {
  ojson body;
  body["error"] = std::string(to_string(code));
  body["message"] = message;
  body["subject"] = subject;
  return {status, body.dump()};
}

// A class name, an integer index or a decimal string index.
std::optional<std::size_t> parse_label(const nlohmann::json& value, const LabelSchema& schema) {
  if (value.is_number_integer()) {
    const auto v = value.get<std::int64_t>();
    if (v < 0 || static_cast<std::size_t>(v) >= schema.size()) return std::nullopt;
    return static_cast<std::size_t>(v);
  }
  if (!value.is_string()) return std::nullopt;
  const auto& s = value.get_ref<const std::string&>();
  if (auto k = schema.index_of(s)) return k;
  std::size_t k = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), k);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty() || k >= schema.size()) {
    return std::nullopt;
  }
  return k;
}

ojson record_json(const IterationRecord& r) { return ojson::parse(history_record_json(r)); }

}  // namespace

std::string_view to_string(SessionStatus s) noexcept {
  switch (s) {
    case SessionStatus::Training: return "training";
    case SessionStatus::AwaitingLabels: return "awaiting_labels";
    case SessionStatus::Done: return "done";
    case SessionStatus::Cancelled: return "cancelled";
    case SessionStatus::Failed: return "failed";
  }
  return "unknown";
}

class AnnotationSession::Oracle final : public LabelOracle {
 public:
  explicit Oracle(AnnotationSession& session) : session_(session) {}
  std::vector<LabeledDocument> label(std::span<const Candidate> batch) override {
    return session_.await_labels(batch);
  }

 private:
  AnnotationSession& session_;
};

AnnotationSession::AnnotationSession(LabelSchema schema, std::vector<LabeledDocument> seed,
                                     std::vector<Document> pool,
                                     std::vector<LabeledDocument> eval, SessionConfig cfg)
    : schema_(std::move(schema)), cfg_(std::move(cfg)), eval_(std::move(eval)) {
  // The vocabulary sees every text the session may score; labels are unused.
  std::vector<std::string> texts;
  texts.reserve(seed.size() + pool.size());
  for (const auto& d : seed) texts.push_back(d.doc.text);
  for (const auto& d : pool) texts.push_back(d.text);
  featurizer_ = TextFeaturizer::fit(texts, cfg_.prep, cfg_.features);

  initial_.labeled = std::move(seed);
  initial_.pool = std::move(pool);
  labeled_ = initial_.labeled;
  pool_size_ = initial_.pool.size();

  if (!cfg_.dir.empty()) {
    std::filesystem::create_directories(cfg_.dir);
    load_journal();
    journal_.open(cfg_.dir / kJournalFile, std::ios::app | std::ios::binary);
    if (!journal_) {
      throw Error(ErrorCode::IoError, "cannot open session journal", (cfg_.dir / kJournalFile).string());
    }
  }
}

AnnotationSession::~AnnotationSession() { cancel(); }

void AnnotationSession::load_journal() {
  std::ifstream in(cfg_.dir / kJournalFile, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // A crash mid-append can leave a torn final line; it was never acknowledged.
    const auto rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.contains("id") || !rec.contains("label")) continue;
    const auto label = parse_label(rec["label"], schema_);
    if (!label) continue;
    replay_[rec["id"].get<std::string>()] = *label;
  }
}

void AnnotationSession::append_journal(const std::string& id, std::size_t label) {
  if (!journal_.is_open()) return;
  ojson rec;
  rec["t"] = t_;
  rec["id"] = id;
  rec["label"] = label;
  journal_ << rec.dump() << '\n';
  journal_.flush();
}

void AnnotationSession::start() {
  std::lock_guard lock(mu_);
  if (worker_.joinable() || cancelled_) return;
  worker_ = std::thread([this] { run(); });
}

void AnnotationSession::cancel() {
  {
    std::lock_guard lock(mu_);
    cancelled_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void AnnotationSession::run() {
  Oracle oracle(*this);
  LoopObserver observer;
  observer.on_iteration = [this](const ActiveLearningState& state, const OvrLinearModel& model) {
    {
      std::lock_guard lock(mu_);
      t_ = state.iteration;
      history_ = state.history;
      labeled_ = state.labeled;
      pool_size_ = state.pool.size();
      model_ = model;
    }
    cv_.notify_all();
  };

  SessionStatus final_status = SessionStatus::Done;
  std::string failure;
  try {
    run_loop(initial_, schema_, cfg_.acq, cfg_.train, featurizer_, eval_, oracle, observer);
  } catch (const Error& e) {
    final_status = e.code() == ErrorCode::SessionCancelled ? SessionStatus::Cancelled
                                                           : SessionStatus::Failed;
    failure = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    final_status = SessionStatus::Failed;
    failure = e.what();
  }
  {
    std::lock_guard lock(mu_);
    status_ = final_status;
    failure_ = std::move(failure);
    pending_.clear();
    received_.clear();
  }
  cv_.notify_all();
}

std::vector<LabeledDocument> AnnotationSession::await_labels(std::span<const Candidate> batch) {
  std::unique_lock lock(mu_);
  pending_.assign(batch.begin(), batch.end());
  received_.clear();
  for (const auto& c : pending_) {
    if (const auto it = replay_.find(c.doc.id); it != replay_.end()) {
      received_[c.doc.id] = it->second;
    }
  }
  status_ = SessionStatus::AwaitingLabels;
  cv_.notify_all();
  cv_.wait(lock, [&] { return cancelled_ || received_.size() == pending_.size(); });
  if (cancelled_) throw Error(ErrorCode::SessionCancelled, "session cancelled");

  std::vector<LabeledDocument> out;
  out.reserve(pending_.size());
  for (const auto& c : pending_) out.push_back({c.doc, received_.at(c.doc.id)});
  pending_.clear();
  received_.clear();
  status_ = SessionStatus::Training;
  cv_.notify_all();
  return out;
}

SessionStatus AnnotationSession::wait_ready(std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return status_ != SessionStatus::Training; });
  return status_;
}

SessionStatus AnnotationSession::status() const {
  std::lock_guard lock(mu_);
  return status_;
}

std::size_t AnnotationSession::iteration() const {
  std::lock_guard lock(mu_);
  return t_;
}

OvrLinearModel AnnotationSession::model() const {
  std::lock_guard lock(mu_);
  return model_;
}

ApiResponse AnnotationSession::get_session() const {
  std::lock_guard lock(mu_);
  ojson body;
  body["session_id"] = cfg_.id;
  body["status"] = std::string(to_string(status_));
  body["schema"] = schema_.names();
  body["t"] = t_;
  body["labeled"] = labeled_.size();
  body["pool"] = pool_size_;
  body["pending"] = status_ == SessionStatus::AwaitingLabels ? pending_.size() : 0;
  body["received"] = status_ == SessionStatus::AwaitingLabels ? received_.size() : 0;
  body["batch_size"] = cfg_.acq.batch_size;
  body["max_iterations"] = cfg_.acq.max_iterations;
  body["strategy"] = std::string(to_string(cfg_.acq.strategy));
  body["history_length"] = history_.size();
  if (!failure_.empty()) body["error"] = failure_;
  return ok(body);
}

ApiResponse AnnotationSession::get_batch() const {
  std::lock_guard lock(mu_);
  std::vector<const Candidate*> order;
  if (status_ == SessionStatus::AwaitingLabels) {
    order.reserve(pending_.size());
    for (const auto& c : pending_) order.push_back(&c);
  }
  std::stable_sort(order.begin(), order.end(), [](const Candidate* a, const Candidate* b) {
    if (a->uncertainty != b->uncertainty) return a->uncertainty > b->uncertainty;
    return a->doc.id < b->doc.id;
  });

  ojson body;
  body["session_id"] = cfg_.id;
  body["t"] = t_;
  body["status"] = std::string(to_string(status_));
  auto docs = ojson::array();
  for (const Candidate* c : order) {
    ojson d;
    d["id"] = c->doc.id;
    d["text"] = c->doc.text;
    d["probs"] = c->probs;
    d["uncertainty"] = c->uncertainty;
    const auto it = received_.find(c->doc.id);
    d["label"] = it == received_.end() ? ojson(nullptr) : ojson(schema_.names()[it->second]);
    docs.push_back(std::move(d));
  }
  body["docs"] = std::move(docs);
  return ok(body);
}

ApiResponse AnnotationSession::get_metrics() const {
  std::lock_guard lock(mu_);
  ojson body;
  auto history = ojson::array();
  for (const auto& r : history_) history.push_back(record_json(r));
  body["history"] = std::move(history);
  return ok(body);
}

ApiResponse AnnotationSession::get_export() const {
  std::lock_guard lock(mu_);
  ojson body;
  body["session_id"] = cfg_.id;
  body["schema"] = schema_.names();
  body["t"] = t_;
  auto docs = ojson::array();
  for (const auto& d : labeled_) {
    ojson row;
    row["id"] = d.doc.id;
    row["text"] = d.doc.text;
    row["label"] = schema_.names()[d.label];
    docs.push_back(std::move(row));
  }
  body["documents"] = std::move(docs);
  return ok(body);
}

ApiResponse AnnotationSession::post_labels(std::string_view body) {
  const auto parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    return fail(400, ErrorCode::MalformedRecord, "body must be a JSON object of id -> label");
  }
  const auto& entries =
      parsed.contains("labels") && parsed["labels"].is_object() ? parsed["labels"] : parsed;

  std::size_t remaining = 0;
  bool committed = false;
  std::size_t t = 0;
  {
    std::lock_guard lock(mu_);
    if (status_ != SessionStatus::AwaitingLabels || pending_.empty()) {
      return fail(409, ErrorCode::NotPending, "no batch is awaiting labels");
    }
    std::vector<std::pair<std::string, std::size_t>> accepted;
    for (const auto& [id, value] : entries.items()) {
      const bool is_pending = std::any_of(pending_.begin(), pending_.end(),
                                          [&](const Candidate& c) { return c.doc.id == id; });
      if (!is_pending) {
        return fail(409, ErrorCode::NotPending, "document '" + id + "' is not in the pending batch",
                    id);
      }
      const auto label = parse_label(value, schema_);
      if (!label) {
        return fail(400, ErrorCode::UnknownLabel,
                    "invalid label " + value.dump() + " for document '" + id + "'", id);
      }
      accepted.emplace_back(id, *label);
    }
    // Last write wins within a batch.
    for (const auto& [id, label] : accepted) {
      append_journal(id, label);
      received_[id] = label;
    }
    remaining = pending_.size() - received_.size();
    committed = remaining == 0;
    // Readers must not see the committed batch as still open.
    if (committed) status_ = SessionStatus::Training;
    t = t_;
  }
  if (committed) cv_.notify_all();

  ojson out;
  out["accepted"] = entries.size();
  out["remaining"] = remaining;
  out["committed"] = committed;
  out["t"] = t;
  return ok(out);
}

ApiResponse AnnotationSession::post_commit() {
  std::lock_guard lock(mu_);
  if (status_ != SessionStatus::AwaitingLabels || pending_.empty()) {
    return fail(409, ErrorCode::NotPending, "no batch is awaiting labels");
  }
  if (received_.size() < pending_.size()) {
    std::string missing;
    for (const auto& c : pending_) {
      if (received_.contains(c.doc.id)) continue;
      if (!missing.empty()) missing += ',';
      missing += c.doc.id;
    }
    return fail(422, ErrorCode::IncompleteBatch,
                std::to_string(pending_.size() - received_.size()) + " documents still need labels",
                missing);
  }
  // Complete batches commit on their last label; the worker is already waking.
  ojson out;
  out["committed"] = true;
  out["t"] = t_;
  return ok(out);
}

void mount_routes(httplib::Server& server, AnnotationSession& session,
                  const std::filesystem::path& static_dir) {
  const auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body, "application/json; charset=utf-8");
  };

  server.Get("/session", [&session, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, session.get_session());
  });
  server.Get("/batch", [&session, reply](const httplib::Request& req, httplib::Response& res) {
    if (req.has_param("wait_ms")) {
      long ms = 0;
      const auto v = req.get_param_value("wait_ms");
      std::from_chars(v.data(), v.data() + v.size(), ms);
      session.wait_ready(std::chrono::milliseconds(std::clamp(ms, 0L, 60000L)));
    }
    reply(res, session.get_batch());
  });
  server.Get("/metrics", [&session, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, session.get_metrics());
  });
  server.Get("/export", [&session, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, session.get_export());
    res.set_header("Content-Disposition", "attachment; filename=\"labeled.json\"");
  });
  server.Post("/labels", [&session, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, session.post_labels(req.body));
  });
  server.Post("/commit", [&session, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, session.post_commit());
  });
  if (!static_dir.empty()) server.set_mount_point("/", static_dir.string());
}

}  // namespace altc
