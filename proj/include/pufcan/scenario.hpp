#pragma once

// Wires a server and a fleet of ECUs onto a simulated bus and runs
// authentication sessions. All randomness is drawn from master_seed.

#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "pufcan/bus.hpp"
#include "pufcan/cli/config.hpp"
#include "pufcan/drbg.hpp"
#include "pufcan/protocol/node.hpp"
#include "pufcan/protocol/server.hpp"

namespace pufcan {

struct SessionResult {
  Micros start{0};
  Micros end{0};  // last session-key frame delivered (== start if none)
  std::size_t frames = 0;
  std::set<NodeId> authenticated;
  std::set<NodeId> operational;
  std::optional<BlockKey> session_key;

  Micros duration() const { return end - start; }
};

struct Received {
  Micros time;
  std::uint16_t id;
  Payload plaintext;
};

class Fleet {
 public:
  /// Fresh devices plus the trusted enrollment phase.
  explicit Fleet(const cli::ScenarioConfig& cfg) : Fleet(cfg, nullptr) {}

  /// Devices re-created from the seed; the server resumes from `db`.
  Fleet(const cli::ScenarioConfig& cfg, const EnrollmentDb& db) : Fleet(cfg, &db) {}

  Fleet(const Fleet&) = delete;
  Fleet& operator=(const Fleet&) = delete;

  const cli::ScenarioConfig& config() const noexcept { return cfg_; }
  Server& server() noexcept { return *server_; }
  const Server& server() const noexcept { return *server_; }
  std::size_t size() const noexcept { return ecus_.size(); }
  Node& node(std::size_t i) { return ecus_.at(i)->node; }
  const std::vector<Received>& inbox(std::size_t i) const { return ecus_.at(i)->inbox; }
  ParticipantId origin_of(std::size_t i) const { return ecus_.at(i)->origin; }

  /// Attach server and ECUs to `bus`. Must precede run_session.
  void attach(Bus& bus) {
    bus_ = &bus;
    server_ecu_.origin = bus.attach(server_ecu_);
    for (auto& e : ecus_) e->origin = bus.attach(*e);
  }

  void subscribe(std::size_t i, std::uint16_t frame_id) { ecus_.at(i)->subscriptions.insert(frame_id); }

  /// Power-on authentication. Nodes in `silent` stay powered off.
  SessionResult run_session(const std::set<NodeId>& silent = {}) {
    Bus& bus = require_bus();
    SessionResult res;
    res.start = bus.now();
    const std::size_t first_event = bus.history().size();

    server_->begin_session();
    for (auto& e : ecus_) {
      e->node.power_off();
      e->key_frames.clear();
      if (silent.contains(e->node.id()) || !e->node.enrolled()) continue;
      for (const auto& f : e->node.begin_auth(cfg_.key_width, noise_)) bus.submit(f, res.start, e->origin);
    }

    bus.run_until_idle(res.start + cfg_.timeout());
    if (server_->phase() == ServerPhase::AuthWindow) {
      bus.run_until(res.start + cfg_.timeout());
      server_ecu_.close_and_issue(bus, bus.now());
    }
    bus.run_until_idle();

    res.end = res.start;
    for (std::size_t i = first_event; i < bus.history().size(); ++i) {
      const auto& ev = bus.history()[i];
      if (is_protocol_frame(ev.frame.id)) {
        ++res.frames;
        res.end = std::max(res.end, ev.time);
      }
    }
    res.authenticated = server_->authenticated();
    for (const auto& e : ecus_)
      if (e->node.phase() == NodePhase::Operational) res.operational.insert(e->node.id());
    res.session_key = server_->session_key();
    return res;
  }

  /// Encrypted application message from ECU i, queued at the current time.
  CanFrame send(std::size_t i, std::uint16_t dest_id, const Payload& payload) {
    Bus& bus = require_bus();
    const auto f = ecus_.at(i)->node.secure_send(dest_id, payload);
    bus.submit(f, bus.now(), ecus_.at(i)->origin);
    return f;
  }

  bool is_protocol_frame(std::uint16_t id) const {
    for (const auto& [nid, rec] : server_->db().nodes())
      if (rec.frame_ids.auth_request_id == id || rec.frame_ids.session_key_id == id) return true;
    return false;
  }

  std::size_t failed_nodes() const { return server_->db().size() - server_->authenticated().size(); }

 private:
  struct Ecu : BusListener {
    Ecu(Fleet& f, Node n) : fleet(f), node(std::move(n)) {}

    void on_frame(const Observation& obs, Bus&) override {
      const auto& f = obs.frame;
      if (node.phase() == NodePhase::AwaitingSessionKey && f.id == node.frame_ids().session_key_id) {
        key_frames.push_back(f);
        if (key_frames.size() == 2) {
          try {
            node.receive_session_key(key_frames, fleet.cfg_.session_mode);
          } catch (const Error&) {
            // garbled key packet: stay out of normal operation
          }
          key_frames.clear();
        }
        return;
      }
      if (node.phase() == NodePhase::Operational && subscriptions.contains(f.id) && f.dlc == 8) {
        inbox.push_back({obs.time, f.id, node.secure_receive(f)});
      }
    }

    Fleet& fleet;
    Node node;
    ParticipantId origin = 0;
    std::vector<CanFrame> key_frames;
    std::set<std::uint16_t> subscriptions;
    std::vector<Received> inbox;
  };

  struct ServerEcu : BusListener {
    explicit ServerEcu(Fleet& f) : fleet(f) {}

    void on_frame(const Observation& obs, Bus& bus) override {
      Server& s = *fleet.server_;
      if (s.phase() != ServerPhase::AuthWindow) return;
      s.on_frame(obs.frame);
      if (s.all_attempted()) close_and_issue(bus, obs.time);
    }

    void close_and_issue(Bus& bus, Micros at) {
      Server& s = *fleet.server_;
      s.close_auth_window();
      if (s.authenticated().empty()) return;
      for (const auto& [id, pair] : s.issue_session_keys(fleet.session_rng_))
        for (const auto& f : pair) bus.submit(f, at, origin);
    }

    Fleet& fleet;
    ParticipantId origin = 0;
  };

  Fleet(const cli::ScenarioConfig& cfg, const EnrollmentDb* db)
      : cfg_(cfg),
        noise_(cfg.master_seed, "puf-noise"),
        session_rng_(cfg.master_seed, "session-keys"),
        server_ecu_(*this) {
    cli::validate(cfg_);
    Drbg seeds(cfg.master_seed, "puf-seeds");
    auto device = [&](double noise) {
      DeviceSeed s{};
      seeds.fill(s);
      return PufDevice(s, cfg_.response_bits, noise);
    };
    PufDevice server_puf = device(0.0);
    std::vector<PufDevice> node_pufs;
    for (unsigned i = 0; i < cfg_.n_ecus; ++i) {
      auto it = cfg_.noise.find(static_cast<NodeId>(i));
      node_pufs.push_back(device(it == cfg_.noise.end() ? 0.0 : it->second));
    }

    if (db == nullptr) {
      server_ = std::make_unique<Server>(std::move(server_puf), cfg_.session_mode, cfg_.key_width);
      for (unsigned i = 0; i < cfg_.n_ecus; ++i) {
        ecus_.push_back(std::make_unique<Ecu>(*this, Node(static_cast<NodeId>(i), std::move(node_pufs[i]))));
        server_->enroll(ecus_.back()->node);
      }
      server_->close_enrollment();
    } else {
      if (db->mode() != cfg_.session_mode || db->key_width() != cfg_.key_width) {
        throw Error(Errc::ConfigInvalid, "enrollment file was made for a different session mode or key width");
      }
      server_ = std::make_unique<Server>(std::move(server_puf), *db);
      for (unsigned i = 0; i < cfg_.n_ecus; ++i) {
        const auto id = static_cast<NodeId>(i);
        const NodeRecord* rec = db->find(id);
        Node n = rec ? Node(id, std::move(node_pufs[i]), rec->frame_ids) : Node(id, std::move(node_pufs[i]));
        if (rec) n.store_server_public(db->server_public());
        ecus_.push_back(std::make_unique<Ecu>(*this, std::move(n)));
      }
    }
  }

  Bus& require_bus() {
    if (bus_ == nullptr) throw std::logic_error("Fleet::attach must be called first");
    return *bus_;
  }

  cli::ScenarioConfig cfg_;
  Drbg noise_;
  Drbg session_rng_;
  std::unique_ptr<Server> server_;
  ServerEcu server_ecu_;
  std::vector<std::unique_ptr<Ecu>> ecus_;
  Bus* bus_ = nullptr;
};

}  // namespace pufcan
