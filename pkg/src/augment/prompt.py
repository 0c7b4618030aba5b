"""Multi-turn persona/context prompt for paraphrase generation."""

from typing import List

from src.corpus.schema import ArtifactSource, LabeledInstance
from src.gateway.base import Message

SOURCE_CONTEXT = {
    ArtifactSource.CODE_COMMENT: ('source code comment from an open-source project', 'code comment'),
    ArtifactSource.ISSUE_SECTION: ('issue section (summary, description or comment) from an issue tracker', 'issue section'),
    ArtifactSource.PULL_SECTION: ('pull request section (summary, description or comment) from GitHub', 'pull request section'),
    ArtifactSource.COMMIT_MESSAGE: ('commit message from GitHub', 'commit message'),
}

PERSONA = (
    "You are a programmer. You write and review code, code comments, issues, "
    "pull requests and commit messages in open-source projects every day."
)


def build_prompt(instance: LabeledInstance, n: int) -> List[Message]:
    """Build the dialogue asking for n meaning-preserving rephrasings.

    Turns: persona, artifact context, acknowledgement, instruction, then the
    instance text as the final user turn.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    long_name, short_name = SOURCE_CONTEXT[instance.source]
    if n == 1:
        amount = "exactly one time"
        layout = "Return the rephrasing as a numbered list with a single item"
    else:
        amount = f"{n} times"
        layout = f"Return a numbered list of {n} items, one rephrasing per line"

    return [
        {'role': 'system', 'content': PERSONA},
        {
            'role': 'user',
            'content': (
                f"The next text is a {long_name}. Keep identifiers, issue keys, "
                f"file names and technical terms exactly as they are."
            ),
        },
        {'role': 'assistant', 'content': f"Understood. Please share the {short_name}."},
        {
            'role': 'user',
            'content': (
                f"Rephrase the following {short_name} {amount}, preserving its original meaning. "
                f"{layout}, and nothing else."
            ),
        },
        {'role': 'user', 'content': instance.text},
    ]
