#include "amcs/packing/buffer_json.hpp"

#include "amcs/asp/parser.hpp"
#include "amcs/error.hpp"

namespace amcs::packing {

namespace {

using json = nlohmann::ordered_json;

json terms(const TermSet& s) {
    json out = json::array();
    for (const auto& t : s) out.push_back(asp::to_string(t));
    return out;
}

Term term_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw ValidationError(path, "expected a term string");
    try {
        Term t = asp::parse_term(j.get<std::string>());
        if (!t.is_ground()) throw ValidationError(path, "term is not ground");
        return t;
    } catch (const SyntaxError& e) {
        throw ValidationError(path, e.what());
    }
}

TermSet term_set_at(const json& j, const std::string& path) {
    TermSet out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw ValidationError(path, "expected an array");
    for (std::size_t i = 0; i < j.size(); ++i) out.insert(term_at(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::string name_at(const json& j, const std::string& path) {
    if (!j.is_string() || j.get<std::string>().empty()) throw ValidationError(path, "expected a name");
    return j.get<std::string>();
}

} // namespace

json to_json(const BufferState& buffer) {
    json j;
    j["clock"] = buffer.clock;
    j["records"] = json::array();
    for (const auto& r : buffer.records) {
        json jr;
        jr["id"] = asp::to_string(r.id);
        jr["source"] = r.source;
        if (r.computation) jr["computation"] = asp::to_string(*r.computation);
        jr["info"] = terms(r.info);
        jr["tags"] = terms(r.tags);
        jr["arrival_index"] = r.arrival_index;
        j["records"].push_back(std::move(jr));
    }
    j["computations"] = json::array();
    for (const auto& [id, c] : buffer.computations) {
        json jc;
        jc["id"] = asp::to_string(id);
        jc["source"] = c.source;
        jc["ended"] = c.ended;
        jc["ignored"] = c.ignored;
        jc["tags"] = terms(c.tags);
        j["computations"].push_back(std::move(jc));
    }
    return j;
}

BufferState buffer_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("$", "expected an object");
    BufferState b;
    if (j.contains("clock")) {
        if (!j["clock"].is_number_integer()) throw ValidationError("clock", "expected an integer");
        b.clock = j["clock"].get<std::int64_t>();
    }
    if (j.contains("computations")) {
        const auto& cs = j["computations"];
        if (!cs.is_array()) throw ValidationError("computations", "expected an array");
        for (std::size_t i = 0; i < cs.size(); ++i) {
            std::string path = "computations[" + std::to_string(i) + "]";
            ComputationRecord c;
            c.id = term_at(cs[i].value("id", json()), path + ".id");
            c.source = name_at(cs[i].value("source", json()), path + ".source");
            c.ended = cs[i].value("ended", false);
            c.ignored = cs[i].value("ignored", false);
            c.tags = term_set_at(cs[i].value("tags", json()), path + ".tags");
            if (!b.computations.emplace(c.id, c).second) throw ValidationError(path + ".id", "duplicate id");
        }
    }
    if (j.contains("records")) {
        const auto& rs = j["records"];
        if (!rs.is_array()) throw ValidationError("records", "expected an array");
        for (std::size_t i = 0; i < rs.size(); ++i) {
            std::string path = "records[" + std::to_string(i) + "]";
            DataSetRecord r;
            r.id = term_at(rs[i].value("id", json()), path + ".id");
            if (b.find_record(r.id)) throw ValidationError(path + ".id", "duplicate id");
            r.source = name_at(rs[i].value("source", json()), path + ".source");
            if (rs[i].contains("computation")) {
                r.computation = term_at(rs[i]["computation"], path + ".computation");
                if (!b.computations.count(*r.computation)) {
                    ComputationRecord c;
                    c.id = *r.computation;
                    c.source = r.source;
                    b.computations.emplace(c.id, c);
                }
            }
            r.info = term_set_at(rs[i].value("info", json()), path + ".info");
            r.tags = term_set_at(rs[i].value("tags", json()), path + ".tags");
            r.arrival_index = rs[i].value("arrival_index", static_cast<std::uint64_t>(i));
            if (i > 0 && r.arrival_index <= b.records.back().arrival_index)
                throw ValidationError(path + ".arrival_index", "must increase");
            b.records.push_back(std::move(r));
        }
    }
    return b;
}

} // namespace amcs::packing
