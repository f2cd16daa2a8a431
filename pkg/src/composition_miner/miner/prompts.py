"""Prompt templates for both mining strategies.

The few-shot prompts carry five fixed demonstrations; the zero-shot
strategy is a sequence of eight small prompts rendered per node. Templates
substitute only the target noun (and the part list for the material
stage), so identical inputs always hash to identical transcript keys.
"""

from __future__ import annotations

from ..llmclient import ChatRequest, make_request

FEWSHOT_SUBTYPES_TEMPLATE = """\
Please list common categories and their sub-categories, and their constituent parts of the given entity. Each type must be distinguished solely by the unique presence of their essential parts or components. Only list essential parts, not in their variations in shape, size, material, or function. Please do not count chemical substances such as electrolyte as essential parts.

Alternatively, you may state "No distinct subtypes based on the constituent parts" instead of listing subtypes if there are no variations in the essential, unique parts that distinguish the subtypes. Then, indicate "Physical parts" underneath.

Please do not state any descriptive terms or clarifications within parentheses. Only indicate "(optional)" where applicable. You may use "internal mechanism" as a part for any components not visible externally but essential for function.

##
Entity 1: Barn
Subtypes 1:
1. English barn: walls, roof, floor, frame, three bays
2. Livestock barn: walls, roof, floor, frame, tack room, feed room (optional), drive bay, silo, stalls
3. Dairy barn: walls, roof, floor, frame, tack room, feed room, drive bay, silo, stalls, milk house, grain bin, indoor corral (optional)
4. Crop storage barn: walls, roof, frame, drive bay
5. Crib barn: walls, roof, cribs, roof shingles
6. Bank barn
6.a) New England barn: walls, roof, roof shingles, floor, tack room (optional), frame
6.b) Pennsylvania barn: walls, roof, roof shingles, floor, forbear, frame, gables (optional)
##
Entity 2: Saucer
Subtypes 2: No distinct subtypes based on the constituent parts.
Physical parts: No distinct parts
##
Entity 3: Paintbrush
Subtypes 3: No distinct subtypes based on the constituent parts.
Physical parts: handle, bristle, ferrule
##
Entity 4: Frying pan
Subtypes 4:
1. Stovetop frying pan: body, handle
2. Electric frying pan: body, handle, legs, lid (optional), lid knob (optional), power cord, thermostat
##
Entity 5: Glove (ice hockey)
Subtypes 5:
1. Skater's gloves: palm, back, fingers, padding
2. Blocker: palm, back, fingers, padding, forearm pad
3. Trapper: palm, back, fingers, padding, cuff, pocket, inner glove
##
Entity 6: {noun}
Subtypes 6:"""

FEWSHOT_MATERIALS_TEMPLATE = """\
Please list the materials that the listed parts of the given entity are typically made of. Exclude any materials used for joining, stitching or dying.

Allow any necessary repetition in materials across different parts. Avoid using "sometimes", "such as", and parentheses in your response. Connect the materials with one of the following conjunctions:
- "and": all listed materials are typically used together
- "or": each of the materials from the list is used exclusively
- "and/or": some of the listed materials are typically used in combination

##
Entity 1: Peripheral webcam (Webcam)
Parts: case, camera lens, image sensor, mount, interface
Materials:
1. case: plastic
2. camera lens: plastic or glass
3. image sensor: electronics
4. mount: metal
5. interface: electronics, metal, and plastics
##
Entity 2: Paper cup
Parts: cup, cardboard lining, lid
Materials:
1. cup: paper
2. cardboard lining: plastic or wax
3. lid: plastic
##
Entity 3: Facial tissue
Parts: -
Materials: absorbent paper
##
Entity 4: Paintbrush
Parts: bristle, ferrule, handle
Materials:
1. bristle: animal hair, nylon, and/or polyester
2. ferrule: metal
3. handle: wood or plastic
##
Entity 5: Skater's gloves (ice hockey)
Parts: palm, back, fingers, padding
Materials:
1. palm: leather
2. back: leather and/or kevlar
3. fingers: leather and/or kevlar
4. padding: foam
##
Entity 6: {noun}
Parts: {parts}
Materials:"""

HAS_SUBTYPES_TEMPLATE = """\
Are there any essential, non-optional parts
1) that are present in one type of {noun} but absent in another and
2) that would be recognized by most people?
Simply say "yes" or "no"."""

LIST_SUBTYPES_TEMPLATE = """\
In numbered points, please simply list physically distinct types of {noun}, where each type is distinguished by unique, externally visible, essential parts.

Exclude any categories that share the same essential external components and functions. The listed categories should reflect differences in their primary operation rather than just external design variations or connections.

Also, avoid from your list any categories that merely represent design variations, subtypes, or alternate names for the same tool. Format each entry as a complete noun without using 'traditional', 'and', 'or', nouns indicating materials, or any prepositional phrases such as 'with' in the names."""

RECOGNIZABILITY_TEMPLATE = """\
How likely would the following types of {noun} be recognized by most people? Add " - [likely / probably likely / probably unlikely / unlikely] recognized by most people" after the nouns in the list. Please do not alter the names within parentheses.

{subtypes}"""

PART_COUNT_TEMPLATE = """\
How many parts does {noun} have? Specifically, how many clearly distinct parts that are attached to it or inseparable from it? Please simply say the number of parts."""

SAME_MATERIALS_TEMPLATE = """\
Are distinct parts of {noun} made of the same materials? Say "yes" or "no"."""

WHOLE_MATERIALS_TEMPLATE = """\
In one line, please list solely the types of materials that {noun} are typically made of. Avoid using "sometimes", and connect the materials with a conjunction, e.g., 'glass, plastic, and/or metal'. Exclude any materials used for joining, stitching or dying.

Here are the conjunctions you can use:
- "and": all listed materials are typically used together
- "or": each of the materials from the list is used exclusively
- "and/or": some of the listed materials are typically used in combination."""

PARTS_AND_WHOLE_MATERIALS_TEMPLATE = """\
1) Starting your paragraph with "<Parts>\\n", in numbered points, please list clearly distinct, essential parts of {noun} with succinct descriptions followed by ":". For each part, insert a new line that starts with "- Optional:". Answer with "yes" or "no".

2) Starting your paragraph with "<Materials>: ", in new bullet points, please list solely the materials that a typical {noun} is entirely made of. Avoid using "sometimes", and connect the materials with a conjunction, e.g., '<Materials>: glass, plastic, and/or metal'. Exclude any materials used for joining, stitching or dying. Here are the conjunctions you can use.
- "and": all listed materials are typically used together
- "or": each of the materials from the list is used exclusively
- "and/or": some of the listed materials are typically used in combination.

Keep your answers very simple, in terms a second-grader would understand."""

PARTS_WITH_MATERIALS_TEMPLATE = """\
In numbered points, please list the clearly distinct, essential parts of {noun} that are attached to it or inseparable from it, with succinct descriptions following ":". Things that have multiple independent uses, such as 'battery', don't count as a part. You may use "internal mechanism" as a part for anything that is not visible from the outside.

For each part, insert a new line that starts with "- Optional:". Answer with "yes" or "no".

Then again, for each part, insert a new line that starts with "- Materials:" and mention the materials the part is typically made of. List the materials, avoiding using "sometimes", and connect the materials with a conjunction, e.g., '- Materials: glass, plastic, and/or metal'. Here are the conjunctions you can use.
- "and": all listed materials are typically used together
- "or": each of the materials from the list is used exclusively
- "and/or": some of the listed materials are typically used in combination.

Keep your answers very simple, in terms a second-grader would understand."""

YES_NO_RETRY_SUFFIX = '\n\nPlease answer with a single word: "yes" or "no".'
COUNT_RETRY_SUFFIX = "\n\nAnswer with a single number."


def render_fewshot_stage1(noun: str, model_id: str) -> ChatRequest:
    return make_request(model_id, FEWSHOT_SUBTYPES_TEMPLATE.format(noun=noun))


def render_fewshot_stage2(noun: str, parts: list[str], model_id: str) -> ChatRequest:
    parts_text = ", ".join(parts) if parts else "-"
    return make_request(
        model_id, FEWSHOT_MATERIALS_TEMPLATE.format(noun=noun, parts=parts_text)
    )


def render_has_subtypes(noun: str, model_id: str) -> ChatRequest:
    return make_request(model_id, HAS_SUBTYPES_TEMPLATE.format(noun=noun))


def render_list_subtypes(noun: str, model_id: str) -> ChatRequest:
    return make_request(model_id, LIST_SUBTYPES_TEMPLATE.format(noun=noun))


def render_recognizability(noun: str, subtypes: list[str], model_id: str) -> ChatRequest:
    listing = "\n".join(f"{i}. {name}" for i, name in enumerate(subtypes, start=1))
    return make_request(
        model_id, RECOGNIZABILITY_TEMPLATE.format(noun=noun, subtypes=listing)
    )


def render_part_count(noun: str, model_id: str) -> ChatRequest:
    return make_request(model_id, PART_COUNT_TEMPLATE.format(noun=noun))


def render_same_materials(noun: str, model_id: str) -> ChatRequest:
    return make_request(model_id, SAME_MATERIALS_TEMPLATE.format(noun=noun))


def render_whole_materials(noun: str, model_id: str) -> ChatRequest:
    return make_request(model_id, WHOLE_MATERIALS_TEMPLATE.format(noun=noun))


def render_parts_and_whole_materials(noun: str, model_id: str) -> ChatRequest:
    return make_request(model_id, PARTS_AND_WHOLE_MATERIALS_TEMPLATE.format(noun=noun))


def render_parts_with_materials(noun: str, model_id: str) -> ChatRequest:
    return make_request(model_id, PARTS_WITH_MATERIALS_TEMPLATE.format(noun=noun))


def with_retry_suffix(request: ChatRequest, suffix: str) -> ChatRequest:
    """A distinct follow-up request used when the first answer was unusable."""
    role, text = request.messages[-1]
    messages = request.messages[:-1] + ((role, text + suffix),)
    return ChatRequest(request.model_id, messages, request.sampling_params)
