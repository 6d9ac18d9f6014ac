#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "pokerl/pokerl.hpp"

using namespace pokerl;

namespace {

const Assets& A() { return default_assets(); }
constexpr MapId kBedroom = 38, kHouse = 37, kPallet = 0, kRoute1 = 12;

WorldState at(MapId map, int x, int y, Direction f = Direction::Down) {
  WorldState s;
  s.map_id = map;
  s.pos = {x, y};
  s.facing = f;
  s.rng = SplitMix64::seeded(1, 1);
  s.maps_visited.set(map);
  return s;
}

WorldState in_battle(std::uint64_t seed = 1) {
  WorldState s = at(kPallet, 10, 11);
  s.rng = SplitMix64::seeded(seed, 3);
  s.battle = BattleState::fresh({});
  return s;
}

}  // namespace

TEST(Rng, StreamsAreDeterministicAndIndependent) {
  auto a = SplitMix64::seeded(42, 1), b = SplitMix64::seeded(42, 1), c = SplitMix64::seeded(42, 2);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 100u);
}

TEST(Rng, BelowAndUniformStayInRange) {
  auto r = SplitMix64::seeded(7, 0);
  std::array<int, 3> hist{};
  for (int i = 0; i < 3000; ++i) {
    const auto v = r.below(3);
    ASSERT_LT(v, 3u);
    ++hist[v];
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  for (int h : hist) EXPECT_GT(h, 850);
}

TEST(Types, ActionIndicesArePinned) {
  EXPECT_EQ(kNumActions, 7);
  for (int i = 0; i < kNumActions; ++i) EXPECT_EQ(index_of(*action_from_index(i)), i);
  EXPECT_FALSE(action_from_index(7));
  EXPECT_FALSE(action_from_index(-1));
  EXPECT_EQ(kActionNames[4], "a");
  EXPECT_TRUE(is_movement(Action::Left));
  EXPECT_FALSE(is_movement(Action::NoOp));
}

TEST(Tilemap, MinimalMapHasOneFloorTile) {
  const auto m = load_tilemap("map 5 TINY\nsize 3 3\n###\n#.#\n###\n");
  EXPECT_EQ(m.id(), 5);
  EXPECT_EQ(m.kind_at({1, 1}), TileKind::Floor);
  int floors = 0;
  for (const auto& t : m.tiles()) floors += t.kind == TileKind::Floor;
  EXPECT_EQ(floors, 1);
}

TEST(Tilemap, GrassRowBecomesGrassTiles) {
  const auto m = load_tilemap("map 1 G\nsize 4 4\n####\n#GG#\n#..#\n####\n");
  EXPECT_EQ(m.kind_at({1, 1}), TileKind::Grass);
  EXPECT_EQ(m.kind_at({2, 1}), TileKind::Grass);
  EXPECT_EQ(m.kind_at({1, 2}), TileKind::Floor);
}

TEST(Tilemap, WarpWithoutDeclarationIsRejected) {
  EXPECT_THROW(load_tilemap("map 1 X\nsize 3 3\n###\n#.#\n#W#\n"), ValidationError);
}

TEST(Tilemap, MalformedDocumentsAreRejected) {
  EXPECT_THROW(load_tilemap("map 1 X\nsize 3 3\n###\n#.\n###\n"), ParseError);        // ragged
  EXPECT_THROW(load_tilemap("map 1 X\nsize 3 3\n###\n#?#\n###\n"), ParseError);       // bad char
  EXPECT_THROW(load_tilemap("map 1 X\nsize 3 3\n###\n#.#\n"), ParseError);            // short
  EXPECT_THROW(load_tilemap("map 1 X\nsize 3 3\n#.#\n#.#\n###\n"), ValidationError);  // open border
  EXPECT_THROW(load_tilemap("map 1 X\nsize 3 3\nwarp 1 1 2 0 0\n###\n#.#\n###\n"), ValidationError);
  EXPECT_THROW(load_tilemap("size 3 3\n###\n#.#\n###\n"), ParseError);
}

TEST(Tilemap, MapSetRejectsDanglingWarpTarget) {
  MapSet ms;
  ms.add(load_tilemap("map 1 X\nsize 3 3\nwarp 1 2 9 1 1\n###\n#.#\n#W#\n"));
  EXPECT_THROW(ms.validate(), ValidationError);
}

TEST(Assets, ShippedMapsHaveCanonicalGeometry) {
  const auto& bed = A().maps.at(kBedroom);
  EXPECT_EQ(bed.width(), 8);
  EXPECT_EQ(bed.height(), 8);
  EXPECT_EQ(bed.at({3, 7}).warp->map, kHouse);
  const auto& house = A().maps.at(kHouse);
  EXPECT_EQ(house.at({3, 7}).warp->map, kPallet);
  EXPECT_EQ(house.at({3, 7}).warp->pos, (TilePos{10, 16}));
  EXPECT_EQ(A().maps.at(kPallet).width(), 20);
  EXPECT_EQ(A().maps.at(kPallet).height(), 18);
  const auto& route = A().maps.at(kRoute1);
  EXPECT_EQ(route.width(), 10);
  EXPECT_EQ(route.height(), 18);
  int grass = 0;
  for (const auto& t : route.tiles()) grass += t.kind == TileKind::Grass;
  EXPECT_EQ(grass, 24);
  EXPECT_NO_THROW(A().validate());
}

TEST(Assets, DataDirectoryMatchesEmbeddedCopy) {
  const Assets loaded = load_assets(POKERL_DATA_DIR);
  EXPECT_EQ(loaded.sequences, A().sequences);
  for (const auto& [id, m] : A().maps.maps()) EXPECT_EQ(loaded.maps.at(id), m);
}

TEST(ResetWorld, SequenceAnchors) {
  const auto s1 = reset_world(1, 9);
  EXPECT_EQ(s1.map_id, kBedroom);
  EXPECT_FALSE(s1.in_battle());
  EXPECT_EQ(s1.party_count, 0);
  const auto s2 = reset_world(2, 9);
  EXPECT_EQ(s2.map_id, kPallet);
  EXPECT_FALSE(s2.in_battle());
  EXPECT_EQ(s2.pos, (TilePos{10, 16}));
  const auto s3 = reset_world(3, 9);
  ASSERT_TRUE(s3.in_battle());
  EXPECT_EQ(s3.battle->phase, BattlePhase::ChooseMove);
  EXPECT_EQ(s3.battle->player_hp, 20);
  EXPECT_EQ(s3.battle->enemy_hp, 19);
  EXPECT_EQ(s3.party_count, 1);
  EXPECT_EQ(reset_world(1, 9), reset_world(1, 9));
  EXPECT_EQ(s1.step_count, 0u);
  EXPECT_TRUE(s1.flags.empty());
  EXPECT_THROW(reset_world(4, 9), UnknownSequence);
}

TEST(StepWorld, MoveUpOntoFloor) {
  const auto s = at(kBedroom, 4, 3, Direction::Up);
  const auto t = step_world(A().maps, s, Action::Up);
  EXPECT_EQ(t.state.pos, (TilePos{4, 2}));
  EXPECT_TRUE(t.events.moved);
  EXPECT_TRUE(t.events.new_tile);
  EXPECT_DOUBLE_EQ(t.events.distance_moved, 1.0);
  EXPECT_EQ(t.state.step_count, 1u);
}

TEST(StepWorld, BlockedMoveOnlyTurns) {
  const auto s = at(kBedroom, 1, 1, Direction::Down);
  const auto t = step_world(A().maps, s, Action::Left);
  EXPECT_EQ(t.state.pos, s.pos);
  EXPECT_EQ(t.state.facing, Direction::Left);
  EXPECT_FALSE(t.events.moved);
  EXPECT_DOUBLE_EQ(t.events.distance_moved, 0.0);
}

TEST(StepWorld, NpcTilesBlock) {
  const auto s = at(kBedroom, 2, 1);
  const auto t = step_world(A().maps, s, Action::Down);  // (2,2) is an NPC
  EXPECT_FALSE(t.events.moved);
}

TEST(StepWorld, WarpChangesMap) {
  const auto s = at(kBedroom, 3, 6);
  const auto t = step_world(A().maps, s, Action::Down);
  EXPECT_EQ(t.state.map_id, kHouse);
  EXPECT_EQ(t.state.pos, (TilePos{6, 1}));
  ASSERT_TRUE(t.events.entered_map);
  EXPECT_EQ(*t.events.entered_map, kHouse);
  EXPECT_TRUE(t.events.first_map_entry);
  EXPECT_TRUE(t.events.moved);
  EXPECT_DOUBLE_EQ(t.events.distance_moved, 0.0);
}

TEST(StepWorld, GrassStartsBattle) {
  const auto s = at(kRoute1, 3, 15);
  const auto t = step_world(A().maps, s, Action::Up);
  EXPECT_TRUE(t.events.entered_grass);
  EXPECT_TRUE(t.events.battle_started);
  ASSERT_TRUE(t.state.in_battle());
  EXPECT_EQ(t.state.battle->phase, BattlePhase::ChooseMove);
}

TEST(StepWorld, ButtonsOnlyCountSteps) {
  const auto s = at(kBedroom, 4, 4);
  for (Action a : {Action::A, Action::B, Action::NoOp}) {
    auto t = step_world(A().maps, s, a);
    EXPECT_EQ(t.state.step_count, s.step_count + 1);
    t.state.step_count = s.step_count;
    EXPECT_EQ(t.state, s);
    EXPECT_EQ(t.events, EventSet{});
  }
}

TEST(StepWorld, AOnFacedEventTileTriggersScript) {
  const auto s = at(kPallet, 10, 10, Direction::Up);  // event tile at (10,9)
  const auto t = step_world(A().maps, s, Action::A);
  ASSERT_TRUE(t.events.scripted_event);
  EXPECT_EQ(*t.events.scripted_event, 1);
  EXPECT_TRUE(t.state.flags.contains(1));
}

TEST(StepWorld, RandomWalkInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (int seq = 1; seq <= 3; ++seq) {
      WorldState s = reset_world(seq, seed);
      auto pick = SplitMix64::seeded(seed, 99);
      for (int i = 0; i < 300; ++i) {
        const Action a = static_cast<Action>(pick.below(kNumActions));
        const auto t = step_world(A().maps, s, a);
        ASSERT_EQ(t.state.step_count, s.step_count + 1);
        const auto& m = A().maps.at(t.state.map_id);
        ASSERT_NE(m.kind_at(t.state.pos), TileKind::Wall);
        if (!s.in_battle() && is_movement(a)) {
          ASSERT_EQ(t.state.facing, direction_of(a));
        }
        // moved <=> same-map distance > 0 or a map change
        ASSERT_EQ(t.events.moved, t.events.distance_moved > 0.0 || t.events.entered_map.has_value());
        s = t.state;
      }
    }
  }
}

TEST(Battle, StrikeDealsThreeToFive) {
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = in_battle(seed);
    const auto t = battle_step(s, Action::A);
    const int dealt = s.battle->enemy_hp - t.state.battle->enemy_hp;
    ASSERT_GE(dealt, 3);
    ASSERT_LE(dealt, 5);
    seen.insert(dealt);
    EXPECT_EQ(t.state.battle->phase, BattlePhase::ResolveText);
    EXPECT_EQ(t.state.battle->pending_text, 2);
    const int taken = s.battle->player_hp - t.state.battle->player_hp;
    ASSERT_GE(taken, 2);
    ASSERT_LE(taken, 4);
  }
  EXPECT_EQ(seen, (std::set<int>{3, 4, 5}));
}

TEST(Battle, TextPhaseIgnoresEverythingButA) {
  auto s = battle_step(in_battle(), Action::A).state;
  for (Action a : {Action::NoOp, Action::B, Action::Up, Action::Down, Action::Left, Action::Right}) {
    auto t = battle_step(s, a);
    EXPECT_EQ(t.state.step_count, s.step_count + 1);
    t.state.step_count = s.step_count;
    EXPECT_EQ(t.state, s);
  }
  auto t = battle_step(s, Action::A);
  EXPECT_EQ(t.state.battle->pending_text, 1);
  t = battle_step(t.state, Action::A);
  EXPECT_EQ(t.state.battle->phase, BattlePhase::ChooseMove);
}

TEST(Battle, CursorAndGrowl) {
  auto s = in_battle();
  s = battle_step(s, Action::Down).state;
  EXPECT_EQ(s.battle->cursor, kMoveGrowl);
  s = battle_step(s, Action::Down).state;
  EXPECT_EQ(s.battle->cursor, kMoveGrowl);
  s = battle_step(s, Action::Left).state;
  EXPECT_EQ(s.battle->cursor, kMoveGrowl);
  const int enemy_before = s.battle->enemy_hp;
  s = battle_step(s, Action::A).state;
  EXPECT_EQ(s.battle->enemy_hp, enemy_before);
  EXPECT_EQ(s.battle->enemy_attack_drop, 1);
  s = battle_step(s, Action::Up).state;  // text phase: no effect
  EXPECT_EQ(s.battle->cursor, kMoveGrowl);
}

TEST(Battle, GrowlFloorsEnemyDamageAtOne) {
  auto s = in_battle(5);
  s.battle->enemy_attack_drop = 10;
  s.battle->cursor = kMoveGrowl;
  const auto t = battle_step(s, Action::A);
  EXPECT_EQ(s.battle->player_hp - t.state.battle->player_hp, 1);
}

TEST(Battle, WinRequiresDrainingText) {
  auto s = in_battle();
  s.battle->enemy_hp = 1;
  s = battle_step(s, Action::A).state;
  EXPECT_EQ(s.battle->outcome, BattleOutcome::Won);
  EXPECT_EQ(s.battle->player_hp, 20);  // the enemy never acted
  auto t = battle_step(s, Action::A);
  EXPECT_TRUE(t.state.in_battle());
  t = battle_step(t.state, Action::A);
  EXPECT_FALSE(t.state.in_battle());
  EXPECT_TRUE(t.events.battle_won);
  EXPECT_FALSE(t.events.battle_lost);
}

TEST(Battle, SimultaneousFaintIsALoss) {
  auto s = in_battle();
  s.battle->player_hp = 1;
  s.battle->enemy_hp = 10;
  s = battle_step(s, Action::A).state;
  EXPECT_EQ(s.battle->outcome, BattleOutcome::Lost);
  s = battle_step(s, Action::A).state;
  const auto t = battle_step(s, Action::A);
  EXPECT_TRUE(t.events.battle_lost);
  EXPECT_FALSE(t.state.in_battle());
}

TEST(Battle, HpNeverIncreasesAndExitTakesPendingText) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto s = in_battle(seed);
    auto pick = SplitMix64::seeded(seed, 17);
    int exit_presses = -1, a_since_decided = 0;
    while (s.in_battle()) {
      const Action a = pick.below(2) ? Action::A : static_cast<Action>(pick.below(kNumActions));
      const bool decided = s.battle->outcome != BattleOutcome::Ongoing;
      if (decided && exit_presses < 0) exit_presses = s.battle->pending_text;
      const auto t = battle_step(s, a);
      if (decided && a == Action::A) ++a_since_decided;
      if (t.state.in_battle()) {
        ASSERT_LE(t.state.battle->player_hp, s.battle->player_hp);
        ASSERT_LE(t.state.battle->enemy_hp, s.battle->enemy_hp);
      }
      s = t.state;
    }
    EXPECT_EQ(a_since_decided, exit_presses);
  }
}

TEST(Battle, NotInBattleThrows) {
  EXPECT_THROW(battle_step(at(kPallet, 5, 5), Action::A), NotInBattle);
}

TEST(Battle, ExactStrikeWinRateIsHigh) {
  const double p = oracle::strike_win_probability({});
  EXPECT_GT(p, 0.95);
  EXPECT_LT(p, 1.0);
}

TEST(MemoryView, SixAddresses) {
  auto s = at(2, 5, 3);
  auto m = memory_view(s);
  ASSERT_EQ(m.size(), 6u);
  EXPECT_EQ(m[0xD362], 5);
  EXPECT_EQ(m[0xD361], 3);
  EXPECT_EQ(m[0xD35E], 2);
  EXPECT_EQ(m[0xD057], 0);
  EXPECT_EQ(m[0xD16C], 0);
  s.battle = BattleState::fresh({});
  s.battle->player_hp = 17;
  m = memory_view(s);
  EXPECT_EQ(m[0xD057], 1);
  EXPECT_EQ(m[0xD16C], 17);
}

TEST(Curriculum, SequencesRoundTripThroughText) {
  for (const auto& s : A().sequences) {
    const auto back = parse_sequences(format_sequence(s));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], s);
  }
  EXPECT_THROW(parse_sequences("sequence id=1 map=0 limit=0"), ValidationError);
  EXPECT_THROW(parse_sequences("sequence id=1 map=0"), ParseError);
  EXPECT_THROW(parse_sequences("sequence id=1 map=0 limit=5 colour=red"), ParseError);
}

TEST(Curriculum, StepLimits) {
  EXPECT_EQ(A().sequence(1).step_limit, 500u);
  EXPECT_EQ(A().sequence(2).step_limit, 2000u);
  EXPECT_EQ(A().sequence(3).step_limit, 300u);
}

TEST(Curriculum, Termination) {
  const auto& s1 = A().sequence(1);
  const auto& s2 = A().sequence(2);
  const auto& s3 = A().sequence(3);
  EventSet none;
  EXPECT_EQ(check_termination(s1, at(kHouse, 6, 1), none, 5), EpisodeOutcome::Running);
  EXPECT_EQ(check_termination(s1, at(kPallet, 10, 16), none, 5), EpisodeOutcome::Success);
  // success wins over the step limit on the same step
  EXPECT_EQ(check_termination(s1, at(kPallet, 10, 16), none, 500), EpisodeOutcome::Success);
  EXPECT_EQ(check_termination(s1, at(kBedroom, 4, 4), none, 500), EpisodeOutcome::Timeout);
  EventSet grass;
  grass.entered_grass = true;
  EXPECT_EQ(check_termination(s2, at(kRoute1, 3, 14), grass, 10), EpisodeOutcome::Success);
  EventSet oak;
  oak.scripted_event = 1;
  EXPECT_EQ(check_termination(s2, at(kPallet, 10, 10), oak, 10), EpisodeOutcome::Success);
  oak.scripted_event = 2;
  EXPECT_EQ(check_termination(s2, at(kPallet, 10, 10), oak, 10), EpisodeOutcome::Running);
  EventSet won, lost;
  won.battle_won = true;
  lost.battle_lost = true;
  EXPECT_EQ(check_termination(s3, at(kPallet, 10, 11), won, 10), EpisodeOutcome::Success);
  EXPECT_EQ(check_termination(s3, at(kPallet, 10, 11), lost, 10), EpisodeOutcome::Loss);
  EXPECT_EQ(check_termination(s3, in_battle(), none, 300), EpisodeOutcome::Timeout);
}
