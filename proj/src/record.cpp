#include "katena/record.hpp"

#include "katena/errors.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace katena::orch {

const WireMark* RecordEntry::find_wire(const std::string& function,
                                       const std::string& target) const {
    for (const auto& w : wires) {
        if (w.function == function && w.target == target) return &w;
    }
    return nullptr;
}

const CutMark* RecordEntry::find_cut(const std::string& facet) const {
    for (const auto& c : cuts) {
        if (c.facet == facet) return &c;
    }
    return nullptr;
}

nlohmann::ordered_json DeploymentRecord::to_json() const {
    nlohmann::ordered_json j;
    j["modelHash"] = model_hash;
    auto entries_json = nlohmann::ordered_json::object();
    for (const auto& [name, e] : entries) {
        nlohmann::ordered_json entry;
        entry["address"] = e.address;
        entry["bytecodeHash"] = e.bytecode_hash;
        entry["txIds"] = e.tx_ids;
        entry["status"] = e.status;
        auto wires = nlohmann::ordered_json::array();
        for (const auto& w : e.wires) {
            wires.push_back({{"function", w.function},
                             {"target", w.target},
                             {"targetAddress", w.target_address},
                             {"tx", w.tx}});
        }
        entry["wires"] = std::move(wires);
        auto cuts = nlohmann::ordered_json::array();
        for (const auto& c : e.cuts) {
            cuts.push_back({{"facet", c.facet},
                            {"facetAddress", c.facet_address},
                            {"selectors", c.selectors},
                            {"tx", c.tx}});
        }
        entry["cuts"] = std::move(cuts);
        if (!e.config_path.empty()) {
            entry["configPath"] = e.config_path;
            entry["configHash"] = e.config_hash;
        }
        entries_json[name] = std::move(entry);
    }
    j["entries"] = std::move(entries_json);
    auto history_json = nlohmann::ordered_json::array();
    for (const auto& h : history) {
        history_json.push_back({{"time", h.time},
                                {"event", h.event},
                                {"node", h.node},
                                {"detail", h.detail},
                                {"tx", h.tx}});
    }
    j["history"] = std::move(history_json);
    return j;
}

std::string DeploymentRecord::to_canonical_json() const { return to_json().dump(2) + "\n"; }

DeploymentRecord DeploymentRecord::from_json(const nlohmann::json& doc) {
    DeploymentRecord record;
    record.model_hash = doc.value("modelHash", "");
    const nlohmann::json entries = doc.value("entries", nlohmann::json::object());
    for (const auto& [name, e] : entries.items()) {
        RecordEntry entry;
        entry.address = e.value("address", "");
        entry.bytecode_hash = e.value("bytecodeHash", "");
        entry.tx_ids = e.value("txIds", std::vector<std::string>{});
        entry.status = e.value("status", "");
        for (const auto& w : e.value("wires", nlohmann::json::array())) {
            entry.wires.push_back({w.value("function", ""), w.value("target", ""),
                                   w.value("targetAddress", ""), w.value("tx", "")});
        }
        for (const auto& c : e.value("cuts", nlohmann::json::array())) {
            entry.cuts.push_back({c.value("facet", ""), c.value("facetAddress", ""),
                                  c.value("selectors", std::vector<std::string>{}),
                                  c.value("tx", "")});
        }
        entry.config_path = e.value("configPath", "");
        entry.config_hash = e.value("configHash", "");
        record.entries[name] = std::move(entry);
    }
    for (const auto& h : doc.value("history", nlohmann::json::array())) {
        record.history.push_back({h.value("time", 0ULL), h.value("event", ""),
                                  h.value("node", ""), h.value("detail", ""),
                                  h.value("tx", "")});
    }
    return record;
}

void DeploymentRecord::save(const std::string& path) const {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw usage_error("cannot write record file '" + path + "'");
        out << to_canonical_json();
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw usage_error("cannot replace record file '" + path + "': " + ec.message());
}

std::optional<DeploymentRecord> DeploymentRecord::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return from_json(nlohmann::json::parse(buf.str()));
    } catch (const nlohmann::json::exception& e) {
        throw usage_error("record file '" + path + "' is corrupt: " + e.what());
    }
}

RecordLock::RecordLock(const std::string& record_path) : path_(record_path + ".lock") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0600);
    if (fd_ < 0) throw usage_error("cannot open lock file '" + path_ + "'");
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw usage_error("record '" + record_path +
                          "' is locked by another orchestrator run");
    }
}

RecordLock::~RecordLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

std::string default_record_path(const std::string& model_path) {
    std::filesystem::path p(model_path);
    return (p.parent_path() / (p.stem().string() + ".katena-state.json")).string();
}

}  // namespace katena::orch
