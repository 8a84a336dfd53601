use std::sync::Arc;

use dogfight_core::airframe::aero::{ConstantAero, NoThrust};
use dogfight_core::airframe::{air_data, AircraftConfig, Airframe, BodyState};
use dogfight_core::engagement::{heading_vector, Outcome};
use dogfight_core::env::*;
use dogfight_core::lowlevel::ControllerGains;
use dogfight_core::maneuvers::ManeuverId;
use dogfight_core::Error;
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn env() -> DogfightEnv {
    DogfightEnv::new(EpisodeConfig::default())
}

#[test]
fn reset_is_deterministic_per_seed() {
    let mut a = env();
    let mut b = env();
    let oa = a.reset(&mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let ob = b.reset(&mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert_eq!(oa, ob);
    assert_eq!(a.states(), b.states());
    let oc = b.reset(&mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    assert_ne!(oa, oc);
}

#[test]
fn reset_draws_within_ranges() {
    let mut e = env();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let obs = e.reset(&mut rng).unwrap();
        assert!(obs.is_finite());
        for s in e.states().unwrap() {
            assert!((3000.0..=8000.0).contains(&s.altitude()), "{}", s.altitude());
            assert!(s.pos.x.abs() <= 3000.0 && s.pos.y.abs() <= 3000.0);
            let mach = air_data(&s.vel_body, s.altitude()).unwrap().mach;
            assert!((0.3 - 1e-9..=0.9 + 1e-9).contains(&mach), "{mach}");
            assert_eq!(s.euler.x, 0.0);
        }
        assert_eq!(e.statuses().map(|s| s.blood), [1.0, 1.0]);
    }
}

#[test]
fn case_study_starts() {
    for (scenario, mach) in [(Scenario::Case1, 0.9), (Scenario::Case2, 0.8)] {
        let mut e = DogfightEnv::new(EpisodeConfig {
            scenario,
            ..EpisodeConfig::default()
        });
        e.reset(&mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let [blue, red] = e.states().unwrap();
        assert_eq!(blue.pos.as_slice(), &[0.0, 2000.0, -5000.0]);
        assert_eq!(red.pos.as_slice(), &[0.0, -2000.0, -5000.0]);
        assert!((blue.euler.z.abs() - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(red.euler.z, 0.0);
        for s in [blue, red] {
            let m = air_data(&s.vel_body, s.altitude()).unwrap().mach;
            assert!((m - mach).abs() < 1e-9);
        }
    }
    assert!("case3".parse::<Scenario>().is_err());
}

#[test]
fn distant_straight_flight_runs_full_period() {
    let mut e = env();
    e.reset_to([
        AircraftInit {
            pos: [0.0, 0.0, -5000.0],
            mach: 0.6,
            yaw_deg: 0.0,
        },
        AircraftInit {
            pos: [0.0, 10_000.0, -5000.0],
            mach: 0.6,
            yaw_deg: 0.0,
        },
    ])
    .unwrap();
    let r = e.step_pair(ManeuverId::StraightFlight, ManeuverId::StraightFlight).unwrap();
    assert!(!r.done);
    assert_eq!(r.outcome, Outcome::Ongoing);
    assert_eq!(r.info.substeps, 100);
    assert_eq!(r.info.bloods, [1.0, 1.0]);
    // side by side, both heading north: ATA = AA = 90
    assert!(r.reward.abs() < 0.02, "{}", r.reward);
}

#[test]
fn parked_in_the_red_zone_kills_blue_in_one_period() {
    // without aerodynamics or thrust both bodies fall identically and never
    // rotate, so the geometry is frozen with blue on red's nose line
    let config = AircraftConfig::f16();
    let af = Airframe::new(config, Arc::new(ConstantAero::zero()), Arc::new(NoThrust));
    let gains = ControllerGains::standard(&config.limits);
    let red = BodyState::level(Vector3::new(0.0, 0.0, -5000.0), 200.0, 0.3);
    let mut blue = red;
    blue.pos += 500.0 * heading_vector(&red.euler);
    let mut e = DogfightEnv::with_parts(EpisodeConfig::default(), af, gains);
    e.reset_states([blue, red]).unwrap();
    let r = e.step_pair(ManeuverId::StraightFlight, ManeuverId::StraightFlight).unwrap();
    assert_eq!(r.info.bloods, [0.0, 1.0]);
    assert!(r.done);
    assert_eq!(r.outcome, Outcome::RedWin);
    // the last of the 100 substeps drains the final blood
    assert_eq!(r.info.substeps, 100);
    assert!(matches!(e.step(ManeuverId::StraightFlight), Err(Error::EpisodeFinished)));
}

#[test]
fn step_before_reset_is_an_error() {
    let mut e = env();
    assert!(matches!(e.step(ManeuverId::Climb), Err(Error::EpisodeFinished)));
}

#[test]
fn episode_times_out_as_tie() {
    let mut e = DogfightEnv::new(EpisodeConfig {
        max_decision_steps: 3,
        ..EpisodeConfig::default()
    });
    e.reset_to([
        AircraftInit {
            pos: [0.0, 0.0, -5000.0],
            mach: 0.6,
            yaw_deg: 0.0,
        },
        AircraftInit {
            pos: [0.0, 10_000.0, -5000.0],
            mach: 0.6,
            yaw_deg: 0.0,
        },
    ])
    .unwrap();
    let outcomes: Vec<_> = (0..3)
        .map(|_| e.step_pair(ManeuverId::StraightFlight, ManeuverId::StraightFlight).unwrap())
        .map(|r| (r.done, r.outcome, r.info.substeps))
        .collect();
    assert_eq!(
        outcomes,
        vec![(false, Outcome::Ongoing, 100), (false, Outcome::Ongoing, 100), (true, Outcome::Tie, 100)]
    );
}

fn random_episode(seed: u64, record: bool) -> (Vec<(Observation, f64, bool)>, Vec<TrajectoryRow>) {
    let mut e = env();
    e.set_recording(record);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    e.reset(&mut rng).unwrap();
    let mut log = Vec::new();
    loop {
        let a = ManeuverId::from_index(rng.gen_range(0..N_ACTIONS)).unwrap();
        let r = e.step(a).unwrap();
        log.push((r.obs, r.reward, r.done));
        if r.done {
            break;
        }
    }
    (log, e.trajectory().to_vec())
}

#[test]
fn identical_seeds_give_identical_trajectories() {
    let (la, ta) = random_episode(21, true);
    let (lb, tb) = random_episode(21, true);
    assert_eq!(la.len(), lb.len());
    for (x, y) in la.iter().zip(&lb) {
        assert_eq!(x.0 .0.map(f64::to_bits), y.0 .0.map(f64::to_bits));
        assert_eq!(x.1.to_bits(), y.1.to_bits());
    }
    assert_eq!(ta.len(), tb.len());
    let mut ca = Vec::new();
    let mut cb = Vec::new();
    write_trajectory(&ta, &mut ca).unwrap();
    write_trajectory(&tb, &mut cb).unwrap();
    assert_eq!(ca, cb);
    let header = String::from_utf8(ca).unwrap();
    assert!(header.starts_with("t,side,p1,p2,p3,phi,theta,psi,v,mach,alpha,beta,blood,maneuver_id,d,ata,aa,hca\n"));
}

#[test]
fn random_policy_fuzz_stays_finite() {
    let mut e = env();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    e.reset(&mut rng).unwrap();
    let mut episodes = 0;
    for _ in 0..10_000 {
        let a = ManeuverId::from_index(rng.gen_range(0..N_ACTIONS)).unwrap();
        let r = e.step(a).unwrap();
        assert!(r.obs.is_finite());
        assert!(r.reward.is_finite() && r.reward.abs() <= 22.0);
        assert_eq!(r.done, r.outcome != Outcome::Ongoing);
        if !r.done {
            assert_eq!(r.info.substeps, 100);
        }
        if r.done {
            episodes += 1;
            e.reset(&mut rng).unwrap();
        }
    }
    assert!(episodes > 0);
}

#[test]
fn summary_round_trips_through_json() {
    let mut e = env();
    e.reset(&mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    e.step(ManeuverId::PositionTracking).unwrap();
    let s = e.summary(Some(5));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    write_summary_file(&s, &path).unwrap();
    let back: EpisodeSummary = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.steps, 1);
}
