#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace katena::orch {

struct WireMark {
    std::string function;
    std::string target;          // node name
    std::string target_address;  // address wired in
    std::string tx;
};

struct CutMark {
    std::string facet;
    std::string facet_address;
    std::vector<std::string> selectors;
    std::string tx;
};

struct RecordEntry {
    std::string address;
    std::string bytecode_hash;
    std::vector<std::string> tx_ids;
    std::string status;  // "deployed" | "wired" | "destroyed"
    std::vector<WireMark> wires;
    std::vector<CutMark> cuts;
    std::string config_path;  // off-chain nodes
    std::string config_hash;

    const WireMark* find_wire(const std::string& function, const std::string& target) const;
    const CutMark* find_cut(const std::string& facet) const;
};

struct HistoryEvent {
    uint64_t time = 0;  // backend timestamp: logical tick (mock) or unix seconds (rpc)
    std::string event;
    std::string node;
    std::string detail;
    std::string tx;
};

// The orchestrator's durable state, persisted after every step.
struct DeploymentRecord {
    std::string model_hash;
    std::map<std::string, RecordEntry> entries;
    std::vector<HistoryEvent> history;

    nlohmann::ordered_json to_json() const;
    std::string to_canonical_json() const;
    static DeploymentRecord from_json(const nlohmann::json& doc);

    void save(const std::string& path) const;
    static std::optional<DeploymentRecord> load(const std::string& path);
};

// Advisory exclusive lock guarding a record file against concurrent
// orchestrator runs. Throws when the lock is already held.
class RecordLock {
public:
    explicit RecordLock(const std::string& record_path);
    ~RecordLock();
    RecordLock(const RecordLock&) = delete;
    RecordLock& operator=(const RecordLock&) = delete;

private:
    int fd_ = -1;
    std::string path_;
};

std::string default_record_path(const std::string& model_path);

}  // namespace katena::orch
