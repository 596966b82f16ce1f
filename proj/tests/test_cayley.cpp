#include <algorithm>

#include <catch2/catch_amalgamated.hpp>

#include "checks.hpp"
#include "groups.hpp"
#include "oracles.hpp"
#include "relhyp/cayley.hpp"

using namespace relhyp;
using namespace relhyp::group_model;
using namespace relhyp::cayley;

namespace {

std::vector<NormalForm> flatten(const Ball& ball) {
    std::vector<NormalForm> all;
    for (const auto& shell : ball.shells) all.insert(all.end(), shell.begin(), shell.end());
    return all;
}

std::vector<int> edge_ids(const GroupSpec& spec, const Path& p) {
    std::vector<int> ids;
    for (const auto& e : p.edges) {
        REQUIRE(e.type == EdgeLabel::Type::XStep);
        ids.push_back(edge_id(e.gen, e.sign));
        (void)spec;
    }
    return ids;
}

}  // namespace

TEST_CASE("paths cache consistent vertex lists", "[cayley]") {
    const auto spec = testgroups::z2z();
    const Path p = path_from(spec, nf_of(spec, "u"),
                             {EdgeLabel::peripheral_step(0, {1, 0}), EdgeLabel::x_step(spec.generator_id("u"), +1)});
    REQUIRE(p.vertices.size() == 3);
    REQUIRE(p.vertices[0] == nf_of(spec, "u"));
    REQUIRE(p.vertices[1] == nf_of(spec, "u s"));
    REQUIRE(p.end() == nf_of(spec, "u s u"));
    REQUIRE(label_of(spec, p) == nf_of(spec, "s u"));
    REQUIRE(rel_path_length(p) == 2);
    REQUIRE(x_path_length(p) == 2);
    REQUIRE(x_cost(EdgeLabel::peripheral_step(0, {2, -3})) == 5);
}

TEST_CASE("ball_X enumerates exact-length shells", "[cayley]") {
    const auto spec = testgroups::z2z();

    const Ball b0 = ball_X(spec, 0);
    REQUIRE(b0.shells.size() == 1);
    REQUIRE(b0.shells[0] == std::vector<NormalForm>{NormalForm{}});

    const Ball b1 = ball_X(spec, 1);
    REQUIRE(b1.shells[1].size() == 6);

    // Frozen shell sizes (1, 6, 26, 110), cross-checked by the independent
    // recursive counter and by literal BFS below.
    const Ball b3 = ball_X(spec, 3);
    std::vector<std::uint64_t> sizes;
    for (const auto& s : b3.shells) sizes.push_back(s.size());
    REQUIRE(sizes == std::vector<std::uint64_t>{1, 6, 26, 110});
    REQUIRE(sizes == oracles::dp_shell_counts_x(spec, 3));

    REQUIRE_THROWS_MATCHES(ball_X(spec, 13), Error, ErrorChecker(ErrorCode::RadiusExceedsCap));
    REQUIRE_THROWS_MATCHES(ball_X(spec, 5, 4), Error, ErrorChecker(ErrorCode::RadiusExceedsCap));

    SECTION("shells match literal BFS and x_length, and are canonically sorted") {
        const auto bfs = oracles::bfs_ball_x(spec, 4);
        const Ball b4 = ball_X(spec, 4);
        std::size_t total = 0;
        for (int d = 0; d <= 4; ++d) {
            const auto& shell = b4.shells[static_cast<std::size_t>(d)];
            total += shell.size();
            for (const auto& g : shell) {
                REQUIRE(x_length(g) == static_cast<std::uint64_t>(d));
                REQUIRE(bfs.at(g) == d);
            }
            REQUIRE(std::is_sorted(shell.begin(), shell.end(),
                                   [&spec](const NormalForm& x, const NormalForm& y) {
                                       return canonical_key(spec, x) < canonical_key(spec, y);
                                   }));
        }
        REQUIRE(total == bfs.size());
        REQUIRE(b4.shells[1].front() == nf_of(spec, "s"));  // canonical order starts at s
    }

    SECTION("shell counts match the recursive counter in all three groups") {
        for (const auto& g : {testgroups::f2(), testgroups::z2z(), testgroups::z2z2()}) {
            const Ball b = ball_X(g, 4);
            std::vector<std::uint64_t> got;
            for (const auto& s : b.shells) got.push_back(s.size());
            REQUIRE(got == oracles::dp_shell_counts_x(g, 4));
        }
    }
}

TEST_CASE("dist_X is the exact word metric", "[cayley]") {
    const auto spec = testgroups::z2z();
    REQUIRE(dist_X(spec, NormalForm{}, nf_of(spec, "s t")) == 2);
    REQUIRE(dist_X(spec, nf_of(spec, "s"), nf_of(spec, "s")) == 0);

    // Frozen at 3: u^-1 s u is an alternating 3-syllable normal form, and the
    // BFS oracle agrees; no 2-step path connects u to s u.
    REQUIRE(dist_X(spec, nf_of(spec, "u"), nf_of(spec, "s u")) == 3);
    REQUIRE(oracles::bfs_ball_x(spec, 3).at(nf_of(spec, "u^-1 s u")) == 3);

    SECTION("agrees with x_length of the quotient on random pairs") {
        Rng rng(7);
        for (int trial = 0; trial < 2000; ++trial) {
            Word wg, wh;
            for (std::size_t i = 0; i < rng.uniform(14); ++i)
                wg.letters.push_back({static_cast<int>(rng.uniform(3)), rng.uniform(2) ? +1 : -1});
            for (std::size_t i = 0; i < rng.uniform(14); ++i)
                wh.letters.push_back({static_cast<int>(rng.uniform(3)), rng.uniform(2) ? +1 : -1});
            const NormalForm g = normalize(spec, wg), h = normalize(spec, wh);
            REQUIRE(dist_X(spec, g, h) == x_length(multiply(spec, invert(g), h)));
            REQUIRE(dist_rel(spec, g, h) == rel_length(spec, multiply(spec, invert(g), h)));
        }
    }

    SECTION("metric axioms, exhaustively on small balls") {
        for (const auto& g : {testgroups::f2(), testgroups::z2z()}) {
            const auto ball = flatten(ball_X(g, 2));
            for (const auto& x : ball)
                for (const auto& y : ball) {
                    REQUIRE(dist_X(g, x, y) == dist_X(g, y, x));
                    REQUIRE((dist_X(g, x, y) == 0) == (x == y));
                    for (const auto& z : ball) REQUIRE(dist_X(g, x, z) <= dist_X(g, x, y) + dist_X(g, y, z));
                }
        }
    }

    SECTION("left invariance of both metrics") {
        Rng rng(11);
        const auto ball = flatten(ball_X(spec, 3));
        for (int trial = 0; trial < 5; ++trial) {
            Word wk;
            for (std::size_t i = 0; i < rng.uniform(9); ++i)
                wk.letters.push_back({static_cast<int>(rng.uniform(3)), rng.uniform(2) ? +1 : -1});
            const NormalForm k = normalize(spec, wk);
            for (const auto& x : ball)
                for (const auto& y : ball) {
                    const NormalForm kx = multiply(spec, k, x), ky = multiply(spec, k, y);
                    REQUIRE(dist_X(spec, x, y) == dist_X(spec, kx, ky));
                    REQUIRE(dist_rel(spec, x, y) == dist_rel(spec, kx, ky));
                }
        }
    }
}

TEST_CASE("geodesic_X walks the canonical spelling", "[cayley]") {
    const auto spec = testgroups::z2z();

    REQUIRE(geodesic_X(spec, NormalForm{}, NormalForm{}).edges.empty());
    REQUIRE(geodesic_X(spec, NormalForm{}, nf_of(spec, "s t")).length() == 2);

    const Path p = geodesic_X(spec, NormalForm{}, nf_of(spec, "u s^-1"));
    REQUIRE(p.edges == std::vector<EdgeLabel>{EdgeLabel::x_step(spec.generator_id("u"), +1),
                                              EdgeLabel::x_step(spec.generator_id("s"), -1)});

    SECTION("length equals dist_X and ends at the target, for all pairs in ball 3") {
        const auto ball = flatten(ball_X(spec, 3));
        for (const auto& g : ball)
            for (const auto& h : ball) {
                const Path q = geodesic_X(spec, g, h);
                REQUIRE(q.length() == dist_X(spec, g, h));
                REQUIRE(q.start == g);
                REQUIRE(q.end() == h);
                const auto key = canonical_key(spec, multiply(spec, invert(g), h));
                REQUIRE(edge_ids(spec, q) == std::vector<int>(key.begin(), key.end()));
            }
    }
}

TEST_CASE("dist_rel is the closed-form relative metric", "[cayley]") {
    const auto spec = testgroups::z2z();
    REQUIRE(dist_rel(spec, NormalForm{}, nf_of(spec, "s^5 t^5")) == 1);
    REQUIRE(dist_rel(spec, NormalForm{}, nf_of(spec, "u^3")) == 3);
    REQUIRE(dist_rel(spec, NormalForm{}, nf_of(spec, "s u t")) == 3);

    SECTION("equals truncated-BFS distance on every element of ball_X(3)") {
        // Sound with exp_cap 3: syllable sup-norms in ball_X(3) are <= 3, so the
        // canonical syllable walk survives the truncation.
        const Ball rel = ball_rel(spec, 3, 3);
        std::unordered_map<NormalForm, std::uint64_t, NfHash> bfs_dist;
        for (std::uint64_t d = 0; d < rel.shells.size(); ++d)
            for (const auto& g : rel.shells[d]) bfs_dist.emplace(g, d);
        for (const auto& g : flatten(ball_X(spec, 3))) {
            REQUIRE(bfs_dist.count(g));
            REQUIRE(bfs_dist.at(g) == dist_rel(spec, NormalForm{}, g));
        }
    }

    SECTION("relative shells match the independent recursive counter") {
        // A ball_rel shell holds truncated-GRAPH-distance-d elements; two capped
        // moves can compose into one long syllable (s^4 = (2,0)+(2,0)), which the
        // truncation then stretches past its closed-form length.  Restricted to
        // elements whose syllables respect the cap, graph distance and closed
        // form coincide, and that restriction is what the counter enumerates.
        const auto sup_within = [&spec](const NormalForm& g, int cap) {
            for (const auto& s : g.syllables) {
                if (!spec.peripheral(s.factor)) continue;  // XSteps are never truncated
                for (const auto e : s.exps)
                    if (abs_u64(e) > static_cast<std::uint64_t>(cap)) return false;
            }
            return true;
        };
        const Ball rel = ball_rel(spec, 3, 2);
        std::vector<std::uint64_t> sizes;
        for (std::size_t d = 0; d < rel.shells.size(); ++d) {
            std::uint64_t n = 0;
            for (const auto& g : rel.shells[d]) {
                const std::uint64_t closed = dist_rel(spec, NormalForm{}, g);
                if (sup_within(g, rel.exp_cap)) {
                    REQUIRE(closed == d);
                    ++n;
                } else {
                    REQUIRE(closed < d);  // truncation only ever lengthens
                }
            }
            sizes.push_back(n);
        }
        REQUIRE(sizes == oracles::dp_shell_counts_rel(spec, 3, 2));

        // With no peripheral factors there is no truncation at all, and the
        // relative and X metrics coincide.
        const auto f2 = testgroups::f2();
        const Ball rel3 = ball_rel(f2, 3, 1);
        std::vector<std::uint64_t> sizes3;
        for (const auto& s : rel3.shells) sizes3.push_back(s.size());
        REQUIRE(sizes3 == oracles::dp_shell_counts_x(f2, 3));
        REQUIRE(sizes3 == oracles::dp_shell_counts_rel(f2, 3, 1));
    }
}

TEST_CASE("geodesic_rel traverses whole peripheral syllables", "[cayley]") {
    const auto spec = testgroups::z2z();

    const Path p1 = geodesic_rel(spec, NormalForm{}, nf_of(spec, "s^5 t^5"));
    REQUIRE(p1.edges == std::vector<EdgeLabel>{EdgeLabel::peripheral_step(0, {5, 5})});

    const Path p2 = geodesic_rel(spec, NormalForm{}, nf_of(spec, "s u t"));
    REQUIRE(p2.edges == std::vector<EdgeLabel>{EdgeLabel::peripheral_step(0, {1, 0}),
                                               EdgeLabel::x_step(spec.generator_id("u"), +1),
                                               EdgeLabel::peripheral_step(0, {0, 1})});

    REQUIRE(geodesic_rel(spec, nf_of(spec, "u s"), nf_of(spec, "u s")).edges.empty());

    SECTION("length equals dist_rel for all pairs in ball 3") {
        const auto ball = flatten(ball_X(spec, 3));
        for (const auto& g : ball)
            for (const auto& h : ball) {
                const Path q = geodesic_rel(spec, g, h);
                REQUIRE(rel_path_length(q) == dist_rel(spec, g, h));
                REQUIRE(q.end() == h);
            }
    }
}

TEST_CASE("enumerate_rel_geodesics finds exactly the truncated geodesics", "[cayley]") {
    const auto spec = testgroups::z2z();

    // A peripheral move is one relative edge, never a generator step: one geodesic.
    const auto gs = enumerate_rel_geodesics(spec, NormalForm{}, nf_of(spec, "s"), 2);
    REQUIRE_FALSE(gs.truncated);
    REQUIRE(gs.paths.size() == 1);
    REQUIRE(gs.paths[0].edges == std::vector<EdgeLabel>{EdgeLabel::peripheral_step(0, {1, 0})});

    const auto gsu = enumerate_rel_geodesics(spec, NormalForm{}, nf_of(spec, "s u"), 2);
    REQUIRE(gsu.paths.size() == 1);
    REQUIRE(gsu.paths[0].edges == std::vector<EdgeLabel>{EdgeLabel::peripheral_step(0, {1, 0}),
                                                         EdgeLabel::x_step(spec.generator_id("u"), +1)});

    SECTION("agrees with the brute-force shortest-path enumeration oracle") {
        const std::vector<std::string> targets = {"s u s", "u s t", "s t u^2", "u^-1 s u", "t^2 u t^-1"};
        for (const auto& target : targets) {
            const NormalForm h = nf_of(spec, target);
            const auto got = enumerate_rel_geodesics(spec, NormalForm{}, h, 3);
            REQUIRE_FALSE(got.truncated);
            auto expected = oracles::brute_rel_geodesic_vertex_paths(spec, NormalForm{}, h, 3);
            std::vector<std::vector<NormalForm>> got_vertices;
            for (const auto& p : got.paths) got_vertices.push_back(p.vertices);
            std::sort(got_vertices.begin(), got_vertices.end(), [&spec](const auto& a, const auto& b) {
                return canonical_key(spec, a.back()) < canonical_key(spec, b.back());
            });
            std::sort(expected.begin(), expected.end(), [&spec](const auto& a, const auto& b) {
                return canonical_key(spec, a.back()) < canonical_key(spec, b.back());
            });
            REQUIRE(got_vertices == expected);
        }
    }

    SECTION("every returned path is a geodesic without backtracking") {
        Rng rng(23);
        const auto ball = flatten(ball_X(spec, 3));
        for (int trial = 0; trial < 40; ++trial) {
            const NormalForm& g = ball[rng.uniform(ball.size())];
            const NormalForm& h = ball[rng.uniform(ball.size())];
            // Boundary syllables of g^-1 h can reach sup-norm 6, so cap 6 keeps
            // every geodesic inside the truncation.
            const auto res = enumerate_rel_geodesics(spec, g, h, 6);
            REQUIRE(!res.paths.empty());
            for (const auto& p : res.paths) {
                REQUIRE(rel_path_length(p) == dist_rel(spec, g, h));
                REQUIRE(p.end() == h);
                REQUIRE_FALSE(cayley::detail::has_connected_peripheral_runs(spec, p));
            }
        }
    }

    SECTION("count cap truncates with the flag set") {
        const auto res = enumerate_rel_geodesics(spec, NormalForm{}, nf_of(spec, "s u"), 2, 0);
        REQUIRE(res.truncated);
        REQUIRE(res.paths.empty());
    }

    SECTION("distance precondition enforced") {
        REQUIRE_THROWS_MATCHES(enumerate_rel_geodesics(spec, NormalForm{}, nf_of(spec, "u^9"), 2), Error,
                               ErrorChecker(ErrorCode::PreconditionViolated));
    }
}

TEST_CASE("ShellEnumerator grows lazily and matches ball_X", "[cayley]") {
    const auto spec = testgroups::z2z2();
    ShellEnumerator shells(spec);
    const Ball ball = ball_X(spec, 3);
    for (int d = 3; d >= 0; --d) REQUIRE(shells.shell(d) == ball.shells[static_cast<std::size_t>(d)]);
}
