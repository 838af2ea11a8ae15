#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <sstream>

#include "formal/cli.hpp"

using namespace formal;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(std::vector<std::string> args)
{
    args.insert(args.begin(), "formal");
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(FORMAL_SAMPLES_DIR) + "/" + name; }

/// Value printed after `key: ` in a text report.
std::string field_of(const std::string& report, const std::string& key)
{
    std::istringstream in(report);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
    return {};
}

const std::string kPd = "vf{dim=2, trunc=4, comp1=[(1 0: 1), (0 2: 1)], comp2=[(0 1: 2), (2 0: 1)]}";

} // namespace

TEST(Cli, ResonanceReport)
{
    Outcome o = run({"resonance", "--dim", "2", "--lambda", "1,-1", "--mu", "0", "--bound", "4"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.out.substr(0, o.out.find('\n')), "# formal-cli format=1 command=resonance op=set");
    EXPECT_EQ(field_of(o.out, "generator"), "[[1, 1], [1, 1]]");
    EXPECT_EQ(field_of(o.out, "solutions"), "[[1, 1], [2, 2], [3, 3], [4, 4]]");
}

TEST(Cli, NormalizeReport)
{
    Outcome o = run({"normalize", "--field", kPd, "--upto", "4"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(field_of(o.out, "normal"), "vf{dim=2, trunc=4, comp1=[(1 0: 1)], comp2=[(0 1: 2), (2 0: 1)]}");
    EXPECT_EQ(field_of(o.out, "removed").rfind("[comp1 (0 2): 1", 0), 0u);
}

TEST(Cli, FormsAndAlgebra)
{
    Outcome a = run({"forms", "--op", "integrable", "--form", "form1{dim=2, trunc=3, dx1: [(0 1: 1)], dx2: []}"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(field_of(a.out, "integrable"), "true");

    Outcome b = run({"algebra", "--gens", sample("projective_line.txt"), "--op", "classify"});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(field_of(b.out, "family"), "projective");
    EXPECT_EQ(field_of(b.out, "sound"), "true");

    Outcome c = run({"algebra", "--gens", sample("nilpotent_dim4.txt"), "--op", "nilpotent"});
    EXPECT_EQ(field_of(c.out, "nilpotent"), "true");

    Outcome d = run({"forms", "--op", "separatrix", "--form", "@" + sample("saddle_form.txt"), "--direction", "1,0"});
    EXPECT_EQ(field_of(d.out, "curve"), "curve{dim=2, trunc=8, comp1=[(1: 1)], comp2=[]}");

    Outcome e = run({"forms", "--op", "logsynth", "--factor", "jet{dim=2, trunc=4, terms=[(1 0: 1)]}", "--factor",
                     "jet{dim=2, trunc=4, terms=[(0 1: 1)]}", "--residues", "1,-1"});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(field_of(e.out, "numerator"), "form1{dim=2, trunc=4, dx1: [(0 1: 1)], dx2: [(1 0: -1)]}");
    Outcome f = run({"forms", "--op", "residues", "--form", field_of(e.out, "numerator"), "--den",
                     field_of(e.out, "denominator"), "--factor", "jet{dim=2, trunc=4, terms=[(1 0: 1)]}", "--factor",
                     "jet{dim=2, trunc=4, terms=[(0 1: 1)]}"});
    ASSERT_EQ(f.code, 0) << f.err;
    EXPECT_EQ(field_of(f.out, "residues"), "[1, -1]");
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"bogus"}).code, 1);
    Outcome bad_op = run({"jet", "--op", "frob"});
    EXPECT_EQ(bad_op.code, 1);
    EXPECT_NE(bad_op.err.find("--op"), std::string::npos);
    Outcome missing = run({"jet", "--op", "add", "--a", "jet{dim=1, trunc=2, terms=[]}"});
    EXPECT_EQ(missing.code, 1);
    EXPECT_NE(missing.err.find("--b"), std::string::npos);

    Outcome domain = run({"algebra", "--gens", sample("diagonal_pair.txt"), "--op", "saturate"});
    EXPECT_EQ(domain.code, 2);
    EXPECT_EQ(domain.err, "error: NotRank1: generic rank is not one\n");
    Outcome parse = run({"jet", "--a", "jet{dim=2"});
    EXPECT_EQ(parse.code, 2);
    EXPECT_EQ(parse.err.rfind("error: ParseError:", 0), 0u);
    Outcome dim = run({"normalize", "--dim", "3", "--field", kPd, "--upto", "4"});
    EXPECT_EQ(dim.code, 2);
    EXPECT_EQ(dim.err.rfind("error: DimensionMismatch:", 0), 0u);
    EXPECT_EQ(run({"normalize", "--dim", "2", "--trunc", "4", "--field", kPd, "--upto", "4"}).code, 0);
}

TEST(Cli, DeterministicAndRoundTrips)
{
    std::vector<std::string> args{"normalize", "--field", kPd, "--upto", "4"};
    Outcome a = run(args), b = run(args);
    EXPECT_EQ(a.out, b.out);
    std::string conj = field_of(a.out, "conjugator");
    EXPECT_EQ(to_literal(read_object(conj)), conj);

    args.insert(args.end(), {"--out", "json"});
    Outcome j = run(args);
    ASSERT_EQ(j.code, 0);
    Json doc = Json::parse(j.out);
    EXPECT_EQ(doc["format"], cli::kFormatVersion);
    // JSON and text encode the same object.
    EXPECT_EQ(to_literal(object_from_json(doc["result"]["conjugator"])), conj);
}

TEST(Cli, BinaryExitCodes)
{
    auto status = [](const std::string& cmd) {
        int s = std::system((std::string(FORMAL_CLI_PATH) + " " + cmd + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(status("resonance --lambda 1,-1 --mu 0 --bound 4"), 0);
    EXPECT_EQ(status("resonance --lambda 0,0 --mu 0"), 2);
    EXPECT_EQ(status("resonance --nope"), 1);
}
