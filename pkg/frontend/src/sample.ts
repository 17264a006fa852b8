// Built-in demo document: the building-fire alarm network.

export const SAMPLE_DOCUMENT = `# Building-fire alarm network: two root causes, alarm, smoke, leaving, report.
var Tampering t f
var Fire t f
var Alarm t f
var Smoke t f
var Leaving t f
var Report t f

cpt Tampering
  0.02 0.98

cpt Fire
  0.01 0.99

cpt Alarm | Tampering Fire
  t t : 0.5 0.5
  t f : 0.85 0.15
  f t : 0.99 0.01
  f f : 0.0001 0.9999

cpt Smoke | Fire
  t : 0.9 0.1
  f : 0.01 0.99

cpt Leaving | Alarm
  t : 0.88 0.12
  f : 0.001 0.999

cpt Report | Leaving
  t : 0.75 0.25
  f : 0.01 0.99
`;
