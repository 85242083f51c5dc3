#ifndef MEGALIGN_IRREGULAR_VERBS_HPP
#define MEGALIGN_IRREGULAR_VERBS_HPP

// Built-in copy of data/irregular_verbs.tsv (tests keep the two identical).

namespace megalign {

inline constexpr const char *kIrregularVerbsTsv = R"TSV(
# lemma	past	past_participle
arise	arose	arisen
awake	awoke	awoken
be	was	been
bear	bore	borne
beat	beat	beaten
become	became	become
begin	began	begun
bend	bent	bent
bet	bet	bet
bind	bound	bound
bite	bit	bitten
bleed	bled	bled
blow	blew	blown
break	broke	broken
breed	bred	bred
bring	brought	brought
broadcast	broadcast	broadcast
build	built	built
burn	burned	burned
burst	burst	burst
buy	bought	bought
cast	cast	cast
catch	caught	caught
choose	chose	chosen
cling	clung	clung
come	came	come
cost	cost	cost
creep	crept	crept
cut	cut	cut
deal	dealt	dealt
dig	dug	dug
do	did	done
draw	drew	drawn
dream	dreamed	dreamed
drink	drank	drunk
drive	drove	driven
dwell	dwelt	dwelt
eat	ate	eaten
fall	fell	fallen
feed	fed	fed
feel	felt	felt
fight	fought	fought
find	found	found
flee	fled	fled
fling	flung	flung
fly	flew	flown
forbid	forbade	forbidden
forecast	forecast	forecast
foresee	foresaw	foreseen
forget	forgot	forgotten
forgive	forgave	forgiven
freeze	froze	frozen
get	got	gotten
give	gave	given
go	went	gone
grind	ground	ground
grow	grew	grown
hang	hung	hung
have	had	had
hear	heard	heard
hide	hid	hidden
hit	hit	hit
hold	held	held
hurt	hurt	hurt
keep	kept	kept
kneel	knelt	knelt
know	knew	known
lay	laid	laid
lead	led	led
lean	leaned	leaned
leap	leapt	leapt
learn	learned	learned
leave	left	left
lend	lent	lent
let	let	let
lie	lay	lain
light	lit	lit
lose	lost	lost
make	made	made
mean	meant	meant
meet	met	met
mislead	misled	misled
mistake	mistook	mistaken
misunderstand	misunderstood	misunderstood
mow	mowed	mown
overcome	overcame	overcome
overtake	overtook	overtaken
overthrow	overthrew	overthrown
pay	paid	paid
prove	proved	proven
put	put	put
quit	quit	quit
read	read	read
rebuild	rebuilt	rebuilt
rid	rid	rid
ride	rode	ridden
ring	rang	rung
rise	rose	risen
run	ran	run
saw	sawed	sawn
say	said	said
see	saw	seen
seek	sought	sought
sell	sold	sold
send	sent	sent
set	set	set
sew	sewed	sewn
shake	shook	shaken
shed	shed	shed
shine	shone	shone
shoot	shot	shot
show	showed	shown
shrink	shrank	shrunk
shut	shut	shut
sing	sang	sung
sink	sank	sunk
sit	sat	sat
slay	slew	slain
sleep	slept	slept
slide	slid	slid
sling	slung	slung
slit	slit	slit
sow	sowed	sown
speak	spoke	spoken
speed	sped	sped
spend	spent	spent
spill	spilled	spilled
spin	spun	spun
spit	spat	spat
split	split	split
spread	spread	spread
spring	sprang	sprung
stand	stood	stood
steal	stole	stolen
stick	stuck	stuck
sting	stung	stung
stink	stank	stunk
stride	strode	stridden
strike	struck	struck
string	strung	strung
strive	strove	striven
swear	swore	sworn
sweep	swept	swept
swell	swelled	swollen
swim	swam	swum
swing	swung	swung
take	took	taken
teach	taught	taught
tear	tore	torn
tell	told	told
think	thought	thought
throw	threw	thrown
thrust	thrust	thrust
tread	trod	trodden
undergo	underwent	undergone
understand	understood	understood
undertake	undertook	undertaken
undo	undid	undone
upset	upset	upset
wake	woke	woken
wear	wore	worn
weave	wove	woven
weep	wept	wept
win	won	won
wind	wound	wound
withdraw	withdrew	withdrawn
withhold	withheld	withheld
withstand	withstood	withstood
wring	wrung	wrung
write	wrote	written
admit	admitted	admitted
commit	committed	committed
control	controlled	controlled
occur	occurred	occurred
omit	omitted	omitted
permit	permitted	permitted
prefer	preferred	preferred
refer	referred	referred
regret	regretted	regretted
submit	submitted	submitted
transfer	transferred	transferred
equip	equipped	equipped
patrol	patrolled	patrolled
compel	compelled	compelled
expel	expelled	expelled
propel	propelled	propelled
repel	repelled	repelled
acquit	acquitted	acquitted
befit	befitted	befitted
confer	conferred	conferred
defer	deferred	deferred
deter	deterred	deterred
incur	incurred	incurred
infer	inferred	inferred
recur	recurred	recurred
rebel	rebelled	rebelled
excel	excelled	excelled
forbear	forbore	forborne
outdo	outdid	outdone
outgrow	outgrew	outgrown
override	overrode	overridden
oversee	oversaw	overseen
overhear	overheard	overheard
partake	partook	partaken
retake	retook	retaken
rewrite	rewrote	rewritten
uphold	upheld	upheld
)TSV";

} // namespace megalign

#endif // MEGALIGN_IRREGULAR_VERBS_HPP
