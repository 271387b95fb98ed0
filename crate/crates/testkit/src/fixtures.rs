//! Deterministic synthetic corpora.
//!
//! The generators compose records from fixed word pools with coprime cycle
//! lengths, so every call yields the same records (no RNG involved) and
//! neighboring records differ in several fields at once. Every field of
//! every record is populated, which the dataset-cardinality suites rely on:
//! a fully populated n-record corpus must yield exactly 2n evaluator
//! examples with zero skips.

use bidforge::corpus::InnovationRecord;

/// (organism, biomimicry paragraph) pairs; 24 entries.
const ORGANISMS: [(&str, &str); 24] = [
    ("kingfisher", "The kingfisher's beak tapers into a slender wedge that pierces the water with almost no splash, so the bird keeps its speed through the surface."),
    ("gecko", "Gecko toe pads carry millions of microscopic hairs whose van der Waals contact lets the lizard cling to smooth vertical glass."),
    ("humpback whale", "Humpback whale flippers have scalloped leading-edge tubercles that delay stall and keep lift at steep angles of attack."),
    ("lotus", "The lotus leaf is covered in waxy micro bumps that make water bead and roll, carrying dirt off the surface as it goes."),
    ("termite", "Termite mounds ventilate themselves through a network of chimneys that drive airflow using only the temperature difference between sun and shade."),
    ("burdock", "Burdock burs are tipped with tiny flexible hooks that latch onto passing fur and release under a deliberate pull."),
    ("boxfish", "The boxfish carries a rigid keratin carapace whose rounded panels give low drag and high stiffness for very little mass."),
    ("woodpecker", "A woodpecker's skull sandwiches spongy bone between beak and brain, absorbing repeated hammer blows without injury."),
    ("shark", "Shark skin is tiled with ribbed denticles that channel the boundary layer and cut turbulent drag as the fish swims."),
    ("owl", "Owl wing feathers end in a soft comb-like fringe that breaks up vortices so the bird flies in near silence."),
    ("honeybee", "Honeybee combs pack hexagonal wax cells that enclose maximum volume for minimum material while resisting crushing."),
    ("spider", "Orb-weaving spiders spin silk whose protein chains uncoil under load, combining high strength with remarkable toughness."),
    ("cactus", "Cactus spines carry conical barbs and grooves that drive condensed fog droplets toward the plant's stem for collection."),
    ("peregrine falcon", "The peregrine falcon folds its wings into a teardrop tuck, reshaping its body for a controlled high-speed dive."),
    ("mussel", "Mussels anchor to wet rock with byssal threads whose catechol-rich glue cures underwater and holds against surf."),
    ("elephant", "An elephant's trunk is a boneless column of crossed muscle layers that bends, twists, and grips with fine control."),
    ("firefly", "Firefly lanterns stack jagged cuticle scales that let internally generated light escape instead of reflecting back inside."),
    ("diatom", "Diatoms grow silica shells whose perforated ribs form a lattice of astonishing stiffness at microscopic scale."),
    ("kangaroo", "Kangaroos store landing energy in long elastic tendons and return it at takeoff, making hopping cheaper the faster they go."),
    ("chameleon", "Chameleon skin shifts color as nanocrystal lattices in its cells stretch and change the wavelengths they reflect."),
    ("albatross", "Albatrosses lock their shoulder joints and ride wind gradients over waves, soaring for hours without a wingbeat."),
    ("pinecone", "Pinecone scales are bilayers that curl open when dry and close when damp, moving with no muscle at all."),
    ("remora", "The remora's dorsal fin forms a ridged suction disc that seals against a shark's skin yet releases with a slide."),
    ("polar bear", "Polar bear fur pairs hollow translucent guard hairs with black skin, trapping solar warmth against arctic cold."),
];

/// Engineering application keywords; 11 entries.
const APPLICATIONS: [&str; 11] = [
    "High-speed train",
    "Wind turbine blade",
    "Building ventilation",
    "Reusable fastener",
    "Underwater vehicle",
    "Crash helmet",
    "Drone rotor",
    "Water harvesting net",
    "Surgical adhesive",
    "Robotic gripper",
    "Packaging foam",
];

/// Benefit keyword lists; 9 entries.
const BENEFITS: [&[&str]; 9] = [
    &["Low drag", "Quiet operation"],
    &["Lightweight", "High stiffness"],
    &["Energy efficient", "Passive operation"],
    &["Strong adhesion", "Easy release"],
    &["Impact resistant", "Durable"],
    &["Self-cleaning", "Low maintenance"],
    &["High lift", "Stall resistant"],
    &["Water efficient", "Scalable"],
    &["Flexible", "Precise control"],
];

/// Outcome clauses for innovation sentences; 7 entries.
const OUTCOMES: [&str; 7] = [
    "cutting energy use in daily operation",
    "surviving repeated impacts without damage",
    "holding firmly while releasing on demand",
    "keeping airflow attached in gusty conditions",
    "shedding dirt and water without cleaning agents",
    "collecting and routing moisture where it is needed",
    "moving quietly without active control",
];

/// Challenge sentence templates; 5 entries, filled with the application.
const CHALLENGES: [&str; 5] = [
    "Reducing drag and noise is a persistent challenge for {app} designs.",
    "Engineers struggle to make {app} components both light and stiff.",
    "A {app} must survive harsh service conditions without frequent maintenance.",
    "Improving the efficiency of {app} systems without adding complexity is difficult.",
    "Attachment and release cycles wear out conventional {app} hardware quickly.",
];

/// Builds `n` fully-populated records, deterministically.
///
/// Field combinations cycle with coprime periods (24 organisms, 11
/// applications, 9 benefit lists, 7 outcomes, 5 challenges), so no two of
/// the first several thousand records share all fields.
pub fn fixture_corpus(n: usize) -> Vec<InnovationRecord> {
    (0..n)
        .map(|i| {
            let (organism, biomimicry) = ORGANISMS[i % ORGANISMS.len()];
            let application = APPLICATIONS[i % APPLICATIONS.len()];
            let benefits = BENEFITS[i % BENEFITS.len()];
            let outcome = OUTCOMES[i % OUTCOMES.len()];
            let challenge_template = CHALLENGES[i % CHALLENGES.len()];
            let app_lower = application.to_lowercase();
            InnovationRecord {
                id: format!("rec-{i:03}"),
                benefits: benefits.iter().map(|b| b.to_string()).collect(),
                applications: vec![application.to_string()],
                challenge: challenge_template.replace("{app}", &app_lower),
                innovation: format!(
                    "A {app_lower} concept borrows the {organism}'s trick, {outcome}."
                ),
                biomimicry: biomimicry.to_string(),
            }
        })
        .collect()
}

/// Robot platform descriptions for the baseline pool; 12 entries.
const ROBOT_PLATFORMS: [(&str, &str); 12] = [
    ("aerial survey drone", "folding rotor arms and a vibration-isolated camera mast"),
    ("ground delivery rover", "rocker suspension that keeps all six wheels loaded on curbs"),
    ("underwater glider", "a buoyancy engine that pumps oil between bladders to porpoise through the water column"),
    ("warehouse picking arm", "a parallel elastic wrist that soaks up contact shocks"),
    ("pipe inspection crawler", "magnetic tracks that grip the pipe wall in any orientation"),
    ("agricultural weeding robot", "a vision gantry that spots seedlings and spares them"),
    ("search and rescue snake robot", "serial joints sealed against dust that let it thread through rubble"),
    ("hull cleaning robot", "brush turbines that recover thrust from the cleaning spray"),
    ("window cleaning climber", "twin suction rails that walk over frame gaps"),
    ("hospital courier robot", "a compliant bumper skirt and whisper-quiet hub motors"),
    ("solar farm inspection rover", "a panoramic thermal head that maps hot cells row by row"),
    ("construction marking robot", "a floor plotter that prints layout lines from the site model"),
];

/// Mission clauses for robot innovations; 3 entries.
const ROBOT_MISSIONS: [&str; 3] = [
    "to cover long routes on a single charge",
    "to operate safely alongside people",
    "to keep working through weather and grime",
];

/// The robotics baseline pool: 36 records, the first three of which are the
/// designated seed samples (aerial, ground, underwater). Returns the pool
/// and the three seed ids.
pub fn robotics_pool() -> (Vec<InnovationRecord>, Vec<String>) {
    let records: Vec<InnovationRecord> = (0..36)
        .map(|i| {
            let (platform, feature) = ROBOT_PLATFORMS[i % ROBOT_PLATFORMS.len()];
            let mission = ROBOT_MISSIONS[i / ROBOT_PLATFORMS.len()];
            let (organism, biomimicry) = ORGANISMS[i % ORGANISMS.len()];
            let benefits = BENEFITS[i % BENEFITS.len()];
            InnovationRecord {
                id: format!("robot-{i:02}"),
                benefits: benefits.iter().map(|b| b.to_string()).collect(),
                applications: vec![format!("Robotics: {platform}")],
                challenge: format!(
                    "A {platform} needs {feature} {mission}, without growing heavier or louder."
                ),
                innovation: format!(
                    "A {platform} with {feature}, tuned {mission}, inspired by the {organism}."
                ),
                biomimicry: biomimicry.to_string(),
            }
        })
        .collect();
    let seeds = records.iter().take(3).map(|r| r.id.clone()).collect();
    (records, seeds)
}
