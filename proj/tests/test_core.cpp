#include <catch2/catch_amalgamated.hpp>

#include "gestauth/core.hpp"

using namespace gestauth;

TEST_CASE("tokens round-trip for every enum") {
  for (auto d : {DeviceKind::Ring, DeviceKind::Watch, DeviceKind::Door})
    CHECK(device_from_token(to_token(d)) == d);
  for (auto s : {SensorKind::Accelerometer, SensorKind::Gyroscope,
                 SensorKind::LinearAccelerometer, SensorKind::Grv})
    CHECK(sensor_from_token(to_token(s)) == s);
  for (auto k : {GestureKind::RingTap, GestureKind::WatchTap, GestureKind::Knock3,
                 GestureKind::Knock5, GestureKind::SecretKnock})
    CHECK(gesture_from_token(to_token(k)) == k);
  for (auto a : {Arm::Left, Arm::Right}) CHECK(arm_from_token(to_token(a)) == a);
  CHECK_FALSE(device_from_token("phone"));
  CHECK_FALSE(gesture_from_token("wave"));
}

TEST_CASE("terminal tokens") {
  CHECK(terminal_token(1) == "1");
  CHECK(terminal_token(6) == "6");
  CHECK(terminal_token(kFreestyleTerminal) == "F");
  CHECK(terminal_from_token("4") == 4);
  CHECK(terminal_from_token("F") == kFreestyleTerminal);
  CHECK_FALSE(terminal_from_token("0"));
  CHECK_FALSE(terminal_from_token("7"));
  CHECK_FALSE(terminal_from_token("12"));
}

TEST_CASE("gesture kind partition") {
  CHECK(is_tap(GestureKind::RingTap));
  CHECK(is_tap(GestureKind::WatchTap));
  CHECK(is_knock(GestureKind::Knock3));
  CHECK(is_knock(GestureKind::Knock5));
  CHECK(is_knock(GestureKind::SecretKnock));
}

TEST_CASE("door exposes only inertial sensors") {
  const auto door = device_sensors(DeviceKind::Door);
  REQUIRE(door.size() == 2);
  CHECK(door[0] == SensorKind::Accelerometer);
  CHECK(door[1] == SensorKind::Gyroscope);
  CHECK(device_sensors(DeviceKind::Ring).size() == 4);
  CHECK(device_sensors(DeviceKind::Watch).size() == 4);
}

TEST_CASE("sensor mask bits are distinct and cover kAllSensors") {
  SensorMask all = 0;
  for (auto s : {SensorKind::Accelerometer, SensorKind::Gyroscope,
                 SensorKind::LinearAccelerometer, SensorKind::Grv}) {
    CHECK((all & sensor_bit(s)) == 0u);
    all |= sensor_bit(s);
  }
  CHECK(all == kAllSensors);
}

TEST_CASE("concatenation order is door, ring, watch") {
  CHECK(concat_rank(DeviceKind::Door) < concat_rank(DeviceKind::Ring));
  CHECK(concat_rank(DeviceKind::Ring) < concat_rank(DeviceKind::Watch));
}

TEST_CASE("window spec validity") {
  CHECK(WindowSpec{2.5, 0.0}.valid());
  CHECK(WindowSpec{4.0, 0.0}.valid());
  CHECK(WindowSpec{3.5, 0.5}.valid());
  CHECK(WindowSpec{0.5, 1.5}.valid());
  CHECK_FALSE(WindowSpec{0.0, 0.0}.valid());
  CHECK_FALSE(WindowSpec{-1.0, 0.0}.valid());
  CHECK_FALSE(WindowSpec{2.5, -0.1}.valid());
  CHECK_FALSE(WindowSpec{4.0, 0.5}.valid());  // runs past the 4 s budget
  CHECK_FALSE(WindowSpec{4.5, 0.0}.valid());
}

namespace {

GestureSegment make_segment() {
  GestureSegment g;
  g.meta.user = "u01";
  g.meta.session = 1;
  g.meta.kind = GestureKind::RingTap;
  g.meta.terminal = 3;
  g.meta.id = "u01:s1:ring-tap:T3:1";
  g.t_start = 1.0;
  g.t_end = 2.0;
  DeviceWindow dev;
  dev.device = DeviceKind::Ring;
  dev.label = "ring";
  SensorWindow acc;
  acc.sensor = SensorKind::Accelerometer;
  acc.rate_hz = 10;
  for (int i = 0; i <= 10; ++i) acc.vec.push_back({1.0 + 0.1 * i, 1, 2, 3});
  SensorWindow grv;
  grv.sensor = SensorKind::Grv;
  grv.rate_hz = 10;
  for (int i = 0; i <= 10; ++i) grv.quat.push_back({1.0 + 0.1 * i, 0, 0, 0, 1});
  dev.sensors = {acc, grv};
  g.devices = {dev};
  return g;
}

}  // namespace

TEST_CASE("validate_segment accepts a well-formed segment") {
  CHECK_NOTHROW(validate_segment(make_segment()));
}

TEST_CASE("validate_segment names the violated invariant") {
  auto empty_window = make_segment();
  empty_window.t_end = empty_window.t_start;
  CHECK_THROWS_WITH(validate_segment(empty_window),
                    Catch::Matchers::ContainsSubstring("empty time window"));

  auto no_terminal = make_segment();
  no_terminal.meta.terminal.reset();
  CHECK_THROWS_WITH(validate_segment(no_terminal),
                    Catch::Matchers::ContainsSubstring("tap without terminal"));

  auto knock = make_segment();
  knock.meta.kind = GestureKind::Knock3;
  knock.meta.terminal.reset();
  CHECK_NOTHROW(validate_segment(knock));  // knocks need no terminal

  auto bad_session = make_segment();
  bad_session.meta.session = 3;
  CHECK_THROWS_WITH(validate_segment(bad_session),
                    Catch::Matchers::ContainsSubstring("bad session index"));

  auto no_devices = make_segment();
  no_devices.devices.clear();
  CHECK_THROWS_WITH(validate_segment(no_devices),
                    Catch::Matchers::ContainsSubstring("no device windows"));

  auto empty_sensor = make_segment();
  empty_sensor.devices[0].sensors[0].vec.clear();
  CHECK_THROWS_WITH(validate_segment(empty_sensor),
                    Catch::Matchers::ContainsSubstring("empty sensor window ring/acc"));

  auto stray_sample = make_segment();
  stray_sample.devices[0].sensors[0].vec.push_back({2.5, 0, 0, 0});
  CHECK_THROWS_WITH(validate_segment(stray_sample),
                    Catch::Matchers::ContainsSubstring("sample outside window"));

  auto bad_quat = make_segment();
  bad_quat.devices[0].sensors[1].quat[4] = {1.4, 0.5, 0.5, 0.5, 0.6};
  CHECK_THROWS_WITH(validate_segment(bad_quat),
                    Catch::Matchers::ContainsSubstring("non-unit quaternion"));
}

TEST_CASE("segment lookup helpers") {
  const auto g = make_segment();
  REQUIRE(g.find(DeviceKind::Ring) != nullptr);
  CHECK(g.find(DeviceKind::Watch) == nullptr);
  const auto* dev = g.find(DeviceKind::Ring);
  REQUIRE(dev->find(SensorKind::Grv) != nullptr);
  CHECK(dev->find(SensorKind::Gyroscope) == nullptr);
}

TEST_CASE("boundary samples sit inside the window within tolerance") {
  auto g = make_segment();
  g.devices[0].sensors[0].vec.push_back({2.0 + 5e-10, 0, 0, 0});  // rounding slack
  CHECK_NOTHROW(validate_segment(g));
}
