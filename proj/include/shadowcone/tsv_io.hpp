#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shadowcone/graph.hpp"

namespace shadowcone {

// FNV-1a, used to stamp artifacts with the hash of their producing config.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
    return buf;
}

// Write-to-temp-then-rename so failed runs leave no partial outputs behind.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), (std::streamsize)content.size());
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
}

struct RawGraph {
    Dag dag;                         // labels + edges, possibly cyclic, duplicates kept
    std::vector<double> confidence;  // aligned with edges; empty if no column
};

// One edge per line: "parent<TAB>child[<TAB>confidence]". '#' starts a comment.
inline RawGraph read_edges_tsv(std::istream& in) {
    RawGraph g;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string parent, child, conf;
        if (!std::getline(ls, parent, '\t') || !std::getline(ls, child, '\t'))
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected parent<TAB>child");
        if (parent.empty() || child.empty())
            throw std::runtime_error("line " + std::to_string(lineno) + ": empty node label");
        g.dag.edges.push_back({g.dag.intern(parent), g.dag.intern(child)});
        if (std::getline(ls, conf, '\t')) {
            g.confidence.resize(g.dag.edges.size() - 1, 0.0);
            g.confidence.push_back(std::stod(conf));
        } else if (!g.confidence.empty()) {
            g.confidence.push_back(0.0);
        }
    }
    return g;
}

inline RawGraph read_edges_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_edges_tsv(in);
}

// Keep the N edges with the highest confidence (stable under ties).
inline void filter_top_confidence(RawGraph& g, size_t top_n) {
    if (g.confidence.empty() || g.dag.edges.size() <= top_n) return;
    std::vector<size_t> idx(g.dag.edges.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](size_t a, size_t b) { return g.confidence[a] > g.confidence[b]; });
    idx.resize(top_n);
    std::sort(idx.begin(), idx.end());
    std::vector<Edge> edges;
    std::vector<double> conf;
    for (size_t i : idx) {
        edges.push_back(g.dag.edges[i]);
        conf.push_back(g.confidence[i]);
    }
    g.dag.edges = std::move(edges);
    g.confidence = std::move(conf);
}

inline std::string edges_to_tsv(const std::vector<std::string>& labels,
                                const std::vector<Edge>& edges,
                                const std::vector<std::string>& header_comments = {}) {
    std::ostringstream out;
    for (auto& c : header_comments) out << "# " << c << "\n";
    for (auto [u, v] : edges) out << labels[u] << '\t' << labels[v] << '\n';
    return out.str();
}

// Flat key=value file.
inline std::string manifest_to_string(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ostringstream out;
    for (auto& [k, v] : kv) out << k << '=' << v << '\n';
    return out.str();
}

inline std::vector<std::pair<std::string, std::string>> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return kv;
}

inline std::string manifest_value(const std::vector<std::pair<std::string, std::string>>& kv,
                                  const std::string& key, const std::string& fallback = "") {
    for (auto& [k, v] : kv)
        if (k == key) return v;
    return fallback;
}

}  // namespace shadowcone
