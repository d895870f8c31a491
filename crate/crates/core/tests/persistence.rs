mod common;

use movable::persistence::{restore, restore_text, snapshot, LayoutSnapshot};
use movable::{Button, Engine, Manipulator, Point, Vector};

#[test]
fn random_scenes_round_trip() {
    let mut rng = common::rng(41);
    for _ in 0..1000 {
        let mut engine = Engine::new(common::random_scene(&mut rng));
        for _ in 0..20 {
            let msg = common::random_message(&mut rng, engine.scene());
            engine.handle_message(&msg);
        }
        let text = engine.snapshot().to_canonical();
        let parsed = LayoutSnapshot::parse(&text).unwrap();
        assert_eq!(parsed.to_canonical(), text);

        let mut other = engine.scene().clone();
        movable::persistence::restore_default(&mut other);
        restore(&mut other, &parsed).unwrap();
        assert_eq!(snapshot(&other).to_canonical(), text);
    }
}

#[test]
fn every_kind_of_change_shows_in_the_snapshot() {
    let mut rng = common::rng(42);
    for _ in 0..100 {
        let scene = common::random_scene(&mut rng);
        let Some(top) = scene.visible().last().cloned() else { continue };
        let base = snapshot(&scene).to_canonical();
        let changed = |f: &dyn Fn(&mut movable::Scene)| {
            let mut s = scene.clone();
            f(&mut s);
            snapshot(&s).to_canonical()
        };
        let id = top.id().to_string();
        let press = top.to_world(common::sample_inner_local(&mut rng, &top));
        let drag = |button: Button, to: Vector| {
            move |s: &mut movable::Scene| {
                let mut m = Manipulator::new();
                m.on_press(s, press, button);
                m.on_move(s, press + to);
            }
        };
        assert_ne!(changed(&drag(Button::Left, Vector::new(3.0, 4.0))), base, "move");
        assert_ne!(changed(&|s| s.set_style(&id, movable::scene::StyleKey::Text, "changed!").unwrap()), base);
        assert_ne!(changed(&|s| s.hide_object(&id).unwrap()), base);
        let border = top.to_world(common::sample_border_local(&mut rng, &top));
        let outward = border - top.center();
        assert_ne!(
            changed(&move |s| {
                let mut m = Manipulator::new();
                m.on_press(s, border, Button::Left);
                m.on_move(s, border + outward * 0.05);
            }),
            base,
            "resize"
        );
        if scene.visible().len() > 1 {
            let bottom = scene.visible()[0].id().to_string();
            assert_ne!(changed(&|s| s.bring_to_top(&bottom).unwrap()), base, "z-order");
        }
        let off_center = top.center() + Vector::new(20.0, 0.0);
        let rotated = changed(&move |s| {
            let mut m = Manipulator::new();
            if m.on_press(s, off_center, Button::Right).is_some() {
                m.on_move(s, top.center() + Vector::new(0.0, 20.0));
            }
        });
        if scene.hit_test(off_center).map(|h| h.0) == Some(id.as_str()) {
            assert_ne!(rotated, base, "rotate");
        }
    }
}

#[test]
fn bad_snapshots_change_nothing() {
    let mut rng = common::rng(43);
    for _ in 0..200 {
        let mut engine = Engine::new(common::random_scene(&mut rng));
        for _ in 0..10 {
            let msg = common::random_message(&mut rng, engine.scene());
            engine.handle_message(&msg);
        }
        let good = engine.snapshot().to_canonical();
        let before = good.clone();
        let some_id = engine.snapshot().objects.keys().next().unwrap().clone();
        let corrupt = [
            good.chars().take(good.len() / 2).collect(),
            good.replacen("\"format_version\":1", "\"format_version\":2", 1),
            good.replacen(&format!("\"{some_id}\":"), "\"intruder\":", 1),
            good.replacen("\"font_size\":", "\"font_size\":-", 1),
            good.replacen("\"angle\":", "\"extra\":1,\"angle\":", 1),
            good.replace("\"z\":0", "\"z\":99"),
            String::from("not json"),
        ];
        let mut scene = engine.scene().clone();
        for text in corrupt.iter().filter(|t| **t != good) {
            assert!(restore_text(&mut scene, text).is_err(), "accepted {text}");
            assert_eq!(snapshot(&scene).to_canonical(), before);
        }
    }
}

#[test]
fn save_and_load_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("layout.json");
    let mut rng = common::rng(44);
    let mut scene = common::random_scene(&mut rng);
    let written = movable::persistence::save(&scene, &path).unwrap();
    let mut m = Manipulator::new();
    if let Some(o) = scene.visible().last().cloned() {
        m.on_press(&mut scene, o.to_world(common::sample_inner_local(&mut rng, &o)), Button::Left);
        m.on_move(&mut scene, Point::new(1.0, 1.0));
    }
    movable::persistence::load(&mut scene, &path).unwrap();
    assert_eq!(snapshot(&scene).to_canonical(), written);
}
