#include "closure_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "ran/graph.hpp"

namespace oracle {

namespace {

const std::vector<std::string> names = {"exact", "close", "broad", "narrow", "related"};

int name_index(const std::string& p)
{
    return static_cast<int>(std::find(names.begin(), names.end(), p) - names.begin());
}

// compose[first][second]; "" means no inference.
const char* const compose_table[5][5] = {
    /* exact   */ {"exact", "close", "broad", "narrow", "related"},
    /* close   */ {"close", "related", "related", "related", ""},
    /* broad   */ {"broad", "related", "broad", "", ""},
    /* narrow  */ {"narrow", "related", "", "narrow", ""},
    /* related */ {"related", "", "", "", ""},
};

std::string compose(const std::string& a, const std::string& b)
{
    if (a.empty() || b.empty())
        return "";
    return compose_table[name_index(a)][name_index(b)];
}

std::string inverse(const std::string& p)
{
    if (p == "broad")
        return "narrow";
    if (p == "narrow")
        return "broad";
    return p;
}

int strength_of(const std::string& p)
{
    if (p == "exact")
        return 4;
    if (p == "close")
        return 3;
    if (p == "broad" || p == "narrow")
        return 2;
    if (p == "related")
        return 1;
    return 0;
}

using Key = std::vector<std::tuple<std::string, int, std::size_t>>;

Key key_of(const std::vector<Edge>& edges, const std::vector<std::size_t>& path)
{
    Key k;
    for (auto i : path)
        k.emplace_back(edges[i].source, edges[i].line, i);
    return k;
}

} // namespace

std::vector<Found> related(const std::vector<std::string>& nodes, const std::vector<Edge>& edges,
                           const std::string& start, int hops, int min_strength)
{
    std::map<std::string, Found> best;

    // Every simple path: extend by any incident edge (either direction) to an unvisited node.
    // Paths whose fold is already "no inference" are still extended; they simply never qualify.
    struct Partial {
        std::string at;
        std::string fold; // "" before the first hop
        bool dead = false;
        double confidence = 1.0;
        std::vector<std::size_t> mappings;
        std::vector<bool> reversed;
        std::vector<std::string> visited;
    };
    std::vector<Partial> frontier{{start, "", false, 1.0, {}, {}, {start}}};
    for (int depth = 1; depth <= hops; ++depth) {
        std::vector<Partial> next;
        for (const auto& p : frontier) {
            for (std::size_t i = 0; i < edges.size(); ++i) {
                for (int dir = 0; dir < 2; ++dir) {
                    const auto& e = edges[i];
                    const std::string& from = dir == 0 ? e.subject : e.object;
                    const std::string& to = dir == 0 ? e.object : e.subject;
                    if (from != p.at)
                        continue;
                    if (std::find(p.visited.begin(), p.visited.end(), to) != p.visited.end())
                        continue;
                    const std::string step = dir == 0 ? e.predicate : inverse(e.predicate);
                    Partial q = p;
                    q.at = to;
                    if (!p.dead) {
                        q.fold = p.mappings.empty() ? step : compose(p.fold, step);
                        q.dead = q.fold.empty();
                    }
                    q.confidence = p.confidence * e.confidence.value_or(1.0);
                    q.mappings.push_back(i);
                    q.reversed.push_back(dir == 1);
                    q.visited.push_back(to);
                    if (!q.dead) {
                        Found f{to, q.fold, strength_of(q.fold), q.confidence, q.mappings, q.reversed};
                        auto it = best.find(to);
                        bool take = it == best.end();
                        if (!take) {
                            const Found& cur = it->second;
                            if (f.strength != cur.strength)
                                take = f.strength > cur.strength;
                            else if (f.mappings.size() != cur.mappings.size())
                                take = f.mappings.size() < cur.mappings.size();
                            else
                                take = key_of(edges, f.mappings) < key_of(edges, cur.mappings);
                        }
                        if (take)
                            best[to] = f;
                    }
                    next.push_back(std::move(q));
                }
            }
        }
        frontier = std::move(next);
    }

    std::vector<Found> out;
    for (auto& [id, f] : best)
        if (id != start && f.strength >= min_strength)
            out.push_back(f);
    std::sort(out.begin(), out.end(), [](const Found& a, const Found& b) {
        if (a.strength != b.strength)
            return a.strength > b.strength;
        return a.target < b.target;
    });
    (void)nodes;
    return out;
}

Case random_case(std::mt19937_64& rng, int max_nodes, int max_edges, int max_hops)
{
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    Case c;
    const int n = uniform(2, max_nodes);
    for (int i = 0; i < n; ++i)
        c.nodes.push_back("t-n" + std::to_string(i));
    const int m = uniform(0, max_edges);
    for (int i = 0; i < m; ++i) {
        Edge e;
        int s = uniform(0, n - 1);
        int o = uniform(0, n - 2);
        if (o >= s)
            ++o;
        e.subject = c.nodes[s];
        e.object = c.nodes[o];
        e.predicate = names[uniform(0, 4)];
        if (uniform(0, 9) >= 3)
            e.confidence = uniform(0, 10) / 10.0;
        // Few distinct (source, line) pairs so that ties reach the index tie-break.
        e.source = uniform(0, 1) ? "b.sssom.tsv" : "a.sssom.tsv";
        e.line = uniform(1, 4);
        c.edges.push_back(std::move(e));
    }
    c.hops = uniform(1, max_hops);
    c.min_strength = uniform(1, 4);
    return c;
}

ran::KnowledgeBase to_knowledge_base(const Case& c)
{
    ran::KnowledgeBase kb;
    ran::Taxonomy t;
    t.id = "t";
    t.name = "random";
    kb.taxonomies.push_back(t);
    for (const auto& id : c.nodes) {
        ran::Risk r;
        r.id = ran::RiskId(id);
        r.tag = id;
        r.name = id;
        r.description = "node " + id;
        r.taxonomy_id = "t";
        kb.risks.push_back(std::move(r));
    }
    for (const auto& e : c.edges) {
        ran::Mapping m;
        m.subject_id = ran::RiskId(e.subject);
        m.object_id = ran::RiskId(e.object);
        m.predicate = *ran::parse_predicate(e.predicate);
        m.confidence = e.confidence;
        m.source = e.source;
        m.origin.at = {e.source, e.line};
        kb.mappings.push_back(std::move(m));
    }
    return kb;
}

std::string describe(const Case& c)
{
    std::ostringstream os;
    os << "nodes=" << c.nodes.size() << " hops=" << c.hops << " min_strength=" << c.min_strength << " edges:";
    for (std::size_t i = 0; i < c.edges.size(); ++i) {
        const auto& e = c.edges[i];
        os << " [" << i << "] " << e.subject << " " << e.predicate << " " << e.object << " @" << e.source << ":"
           << e.line;
    }
    return os.str();
}

std::vector<std::string> compare_with_engine(const Case& c)
{
    std::vector<std::string> problems;
    const auto g = ran::KnowledgeGraph::build(to_knowledge_base(c));
    for (const auto& start : c.nodes) {
        const auto expected = related(c.nodes, c.edges, start, c.hops, c.min_strength);
        const auto actual = g.related_risks(ran::RiskId(start), c.hops, c.min_strength);
        auto report = [&](const std::string& what) { problems.push_back("from " + start + ": " + what); };
        if (expected.size() != actual.size()) {
            report("expected " + std::to_string(expected.size()) + " results, engine returned " +
                   std::to_string(actual.size()));
            continue;
        }
        for (std::size_t i = 0; i < expected.size(); ++i) {
            const auto& e = expected[i];
            const auto& a = actual[i];
            if (a.risk.id.str() != e.target) {
                report("position " + std::to_string(i) + ": expected " + e.target + ", got " + a.risk.id.str());
                continue;
            }
            if (std::string(ran::to_string(a.predicate)) != e.predicate || a.strength != e.strength)
                report(e.target + ": expected " + e.predicate + ", got " + std::string(ran::to_string(a.predicate)));
            if (std::fabs(a.confidence - e.confidence) > 1e-12)
                report(e.target + ": confidence differs");
            bool same_path = a.path.size() == e.mappings.size();
            for (std::size_t h = 0; same_path && h < a.path.size(); ++h)
                same_path = a.path[h].mapping_index == e.mappings[h] && a.path[h].reversed == e.reversed[h];
            if (!same_path)
                report(e.target + ": chose a different path");
        }
    }
    return problems;
}

} // namespace oracle
