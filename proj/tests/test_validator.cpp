#include "bridgesim/validator.hpp"
#include "doctest.h"

using namespace bridgesim;

namespace {

std::function<std::uint64_t()> draws(std::vector<std::uint64_t> seq) {
  auto idx = std::make_shared<std::size_t>(0);
  auto vals = std::make_shared<std::vector<std::uint64_t>>(std::move(seq));
  return [idx, vals] {
    REQUIRE(*idx < vals->size());
    return (*vals)[(*idx)++];
  };
}

}  // namespace

TEST_CASE("committee draw: hand-traced elimination order") {
  // Sorted acceptors [1,3,5,7]; committee of 3 keeps two of them.
  // Draw 5 removes index 5%4=1 (value 3); draw 2 removes index 2%3=2
  // (value 7). Proposer 2 joins the survivors.
  auto signers = selectSigners({3, 1, 7, 5}, 2, 3, draws({5, 2}));
  CHECK(signers == std::vector<int>{1, 2, 5});
}

TEST_CASE("committee draw: no randomness consumed when everyone fits") {
  auto mustNotDraw = []() -> std::uint64_t {
    FAIL("no draw expected");
    return 0;
  };
  CHECK(selectSigners({4}, 0, 3, mustNotDraw) == std::vector<int>{0, 4});
  CHECK(selectSigners({5, 4}, 0, 3, mustNotDraw) == std::vector<int>{0, 4, 5});
  CHECK(selectSigners({}, 2, 1, mustNotDraw) == std::vector<int>{2});
}

TEST_CASE("committee draw: proposer always survives, result stays sorted") {
  SplitMix64 prg(99);
  for (int round = 0; round < 50; ++round) {
    std::vector<int> acceptors;
    for (int v = 0; v < 10; ++v)
      if (v != 3 && prg.below(2)) acceptors.push_back(v);
    auto signers = selectSigners(acceptors, 3, 4, [&prg] { return prg.next(); });
    CHECK(std::is_sorted(signers.begin(), signers.end()));
    CHECK(std::count(signers.begin(), signers.end(), 3) == 1);
    std::size_t expected = std::min<std::size_t>(acceptors.size(), 3) + 1;
    CHECK(signers.size() == expected);
  }
}

TEST_CASE("committee draw: identical seeds give identical committees") {
  std::vector<int> acceptors{0, 1, 2, 4, 5, 6, 7, 8};
  SplitMix64 a(1234), b(1234);
  auto first = selectSigners(acceptors, 3, 4, [&a] { return a.next(); });
  auto second = selectSigners(acceptors, 3, 4, [&b] { return b.next(); });
  CHECK(first == second);
}

TEST_CASE("adversary flag names round-trip") {
  CHECK(AdversaryFlags{}.str() == "honest");
  CHECK(AdversaryFlags{AdversaryFlags::silentSigner}.str() == "silentSigner");
  CHECK(AdversaryFlags{AdversaryFlags::crashedProposer | AdversaryFlags::acceptThenAbort}.str() ==
        "crashedProposer+acceptThenAbort");

  const char* names[] = {"silentSigner",    "neverAccept",     "crashedProposer",
                         "arbitraryCommittee", "acceptThenAbort", "corruptProposal",
                         "forgeProposal",   "colludeSign"};
  std::uint32_t all = 0;
  for (const char* name : names) {
    auto bit = AdversaryFlags::flagFromName(name);
    REQUIRE(bit.has_value());
    CHECK(AdversaryFlags{*bit}.str() == name);
    all |= *bit;
  }
  CHECK(all == 0xff);  // the eight flags cover distinct bits
  CHECK_FALSE(AdversaryFlags::flagFromName("honest").has_value());
  CHECK_FALSE(AdversaryFlags::flagFromName("").has_value());
}

TEST_CASE("session arithmetic: clock to session id and back") {
  ValidatorNode::Context ctx;
  ctx.index = 0;
  ctx.params.n = 4;
  ctx.params.t = 1;
  ctx.sessionStart = 2;
  SimNetwork net(4);
  Seed32 seed{};
  TssEngine engine("grp", seed, 2);
  ValidatorNode node(ctx, &net, &engine, {});

  CHECK(node.sessionBase(0) == 2);
  CHECK(node.sessionBase(1) == 32);
  CHECK(node.sessionBase(7) == 2 + 7 * 30);

  CHECK(node.sidAt(0) == 0);  // before the protocol starts
  CHECK(node.sidAt(2) == 0);
  CHECK(node.sidAt(31) == 0);
  CHECK(node.sidAt(32) == 1);
  CHECK(node.sidAt(61) == 1);
  CHECK(node.sidAt(62) == 2);

  // Fresh node has no protocol state to report.
  CHECK_FALSE(node.proposalSeen(0).has_value());
  CHECK_FALSE(node.signersSeen(0).has_value());
  CHECK(node.requests().empty());
  CHECK(node.honest());
}

TEST_CASE("deposit payloads survive the wire codec") {
  DepositData d;
  d.sourceChainId = "evm-1";
  d.depositTxHash = sha256(Bytes{1});
  d.txNonce = 2;
  d.sender = "0xalice";
  d.tokenAddr = "tok";
  d.amount = 77;
  d.targetChainId = "btc-1";
  d.targetAddr = "btc-bob";

  BinWriter w;
  writeDepositData(w, d);
  Bytes buf = w.take();
  BinReader r(buf);
  DepositData back = readDepositData(r);
  CHECK(r.ok());
  CHECK(back.sourceChainId == d.sourceChainId);
  CHECK(back.depositTxHash == d.depositTxHash);
  CHECK(back.txNonce == d.txNonce);
  CHECK(back.sender == d.sender);
  CHECK(back.tokenAddr == d.tokenAddr);
  CHECK(back.amount == d.amount);
  CHECK(back.targetChainId == d.targetChainId);
  CHECK(back.targetAddr == d.targetAddr);
  CHECK(canonicalFieldHash(back) == canonicalFieldHash(d));
}
