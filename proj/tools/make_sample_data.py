#!/usr/bin/env python3
"""Regenerates data/sample: victim feed, company directory, and the recorded
model replies used by the fixture client.

usage: make_sample_data.py <path to ransomrisk binary>

Reports and prompt specs are hand-written and read as-is. Fixture files are
keyed by the hash of the compiled prompt, so they must be regenerated after
editing either.
"""

import json
import random
import subprocess
import sys
import tempfile
from pathlib import Path

SAMPLE = Path(__file__).resolve().parent.parent / "data" / "sample"


def month_range(first, last):
    y, m = map(int, first.split("-"))
    out = []
    while f"{y:04d}-{m:02d}" <= last:
        out.append(f"{y:04d}-{m:02d}")
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    return out


# Per group as named in the victim feed: victim attribute pools and a
# contiguous activity window. Victims are spread evenly over the window.
PROFILES = {
    "Phobos": dict(
        countries=["US"],
        sectors=[["automotive", "manufacturing"], ["automotive"], ["manufacturing"], ["automotive", "manufacturing"]],
        org_types=["for-profit"],
        employees=(1500, 12000),
        revenue=(600_000_000, 5_000_000_000),
        months=month_range("2023-10", "2024-03"),
        count=16,
    ),
    "Rhysida": dict(
        countries=["GB", "AU", "ES", "IT", "CL", "PT"],
        sectors=[["education"], ["healthcare"], ["government-local"], ["education", "government-local"]],
        org_types=["school", "hospital", "government"],
        employees=(60, 2500),
        revenue=(4_000_000, 180_000_000),
        months=month_range("2023-05", "2023-11"),
        count=15,
    ),
    "LockBit": dict(
        countries=["DE", "FR", "IT", "JP", "BR"],
        sectors=[["retail"], ["financial-services"], ["technology"], ["construction"], ["retail", "technology"]],
        org_types=["for-profit"],
        employees=(300, 40000),
        revenue=(40_000_000, 9_000_000_000),
        months=month_range("2023-01", "2023-08"),
        count=16,
    ),
    "ALPHV": dict(
        countries=["US", "CA"],
        sectors=[["healthcare"], ["insurance"], ["energy"], ["financial-services"], ["healthcare", "insurance"]],
        org_types=["hospital", "for-profit"],
        employees=(400, 20000),
        revenue=(90_000_000, 7_000_000_000),
        months=month_range("2022-06", "2023-01"),
        count=15,
    ),
    "Akira": dict(
        countries=["US", "CA", "GB", "DE"],
        sectors=[["construction"], ["technology"], ["hospitality-leisure"], ["financial-services"]],
        org_types=["for-profit"],
        employees=(15, 450),
        revenue=(1_500_000, 90_000_000),
        months=month_range("2023-06", "2024-01"),
        count=15,
    ),
    "Play": dict(
        countries=["DE", "CH", "AR", "NL"],
        sectors=[["government-local"], ["telecommunications"], ["transportation"]],
        org_types=["government", "for-profit"],
        employees=(100, 6000),
        revenue=(10_000_000, 1_200_000_000),
        months=month_range("2022-09", "2023-03"),
        count=14,
    ),
}

WORDS = ["North", "Summit", "Harbor", "Blue", "Granite", "Meridian", "Pioneer", "Cedar", "Atlas", "Vertex", "Lumen",
         "Orchard", "Keystone", "Silver", "Beacon", "Crescent", "Redwood", "Union", "Prairie", "Coastal"]
SUFFIX = {"for-profit": ["Industries", "Group", "Systems", "Holdings", "Corp"],
          "school": ["Academy", "College", "School District"],
          "hospital": ["Health", "Medical Center", "Hospital Trust"],
          "government": ["County Council", "Municipality", "City Services"]}


def company_name(rng, org_type, used):
    while True:
        name = f"{rng.choice(WORDS)} {rng.choice(WORDS)} {rng.choice(SUFFIX[org_type])}"
        if name not in used:
            used.add(name)
            return name


def build_victims(rng):
    lines, directory, used = [], {}, set()
    for group, p in PROFILES.items():
        for i in range(p["count"]):
            org = rng.choice(p["org_types"])
            name = company_name(rng, org, used)
            month = p["months"][i % len(p["months"])]
            rec = {
                "group_name": group,
                "victim_name": name,
                "discovered": f"{month}-{rng.randint(1, 28):02d}",
                "description": f"{name} is a {org} organization listed on the {group} leak site.",
                "country": rng.choice(p["countries"]),
                "sectors": rng.choice(p["sectors"]),
                "revenue": int(rng.uniform(*p["revenue"])),
                "employees": rng.randint(*p["employees"]),
                "org_type": org,
            }
            # Every fourth victim has its size figures only in the directory.
            if i % 4 == 3:
                directory[name] = {"revenue": rec.pop("revenue"), "employees": rec.pop("employees")}
            lines.append(rec)

    # Records the filters and the enrichment step must drop.
    lines.append({"group_name": "Phobos", "victim_name": "Old Mill Castings", "discovered": "2020-11-04",
                  "description": "Foundry attacked before the cutoff.", "country": "US", "sectors": ["manufacturing"],
                  "revenue": 90000000, "employees": 400, "org_type": "for-profit"})
    lines.append({"group_name": "Vice Society", "victim_name": "Lakeside Primary School", "discovered": "2022-10-11",
                  "description": "School claimed by a group with no report.", "country": "GB",
                  "sectors": ["education"], "revenue": 2000000, "employees": 40, "org_type": "school"})
    lines.append({"group_name": "Akira", "victim_name": "Unnamed Contractor", "discovered": "2023-09-02",
                  "description": "", "country": "US", "sectors": ["construction"], "revenue": 5000000,
                  "employees": 30, "org_type": "for-profit"})
    lines.append({"group_name": "LockBit", "victim_name": "Mystery Logistics", "discovered": "2023-03-15",
                  "description": "Logistics firm with no public size figures.", "country": "FR",
                  "sectors": ["transportation"], "org_type": "for-profit"})
    rng.shuffle(lines)
    text = "\n".join(json.dumps(l) for l in lines) + "\n"
    # One malformed line, kept to show the rejection report.
    text += '{"group_name": "Play", "victim_name": "Broken Date GmbH", "discovered": "2023-13-45", "description": "x"}\n'
    return text, directory


RESPONSES = {
    "akira": {
        "adversary_name": {"value": "Akira", "rationale": "The report is titled and written about Akira."},
        "aliases": {"value": [], "rationale": "No other names are given."},
        "sophistication": {"value": "intermediate", "rationale": "Commodity tools: Mimikatz, WinRAR, Rclone."},
        "resource_level": {"value": "team", "rationale": "The crew appears small."},
        "motive": {"value": "financial-gain", "rationale": "Payment is demanded in Bitcoin."},
        "intent": {"value": ["extortion", "information-theft"], "rationale": "Files are stolen and publication is threatened."},
        "ttps": {"value": ["T1133", "T1078", "T1136", "T1003", "T1021.001", "T1560", "T1567", "T1486", "T1490", "T9999.99"],
                 "rationale": "VPN access with valid accounts, new accounts, credential dumping, RDP, archiving, exfiltration, encryption, shadow copy deletion."},
        "cves": {"value": [], "rationale": "No CVE is named."},
        "target_industry_sectors": {"value": ["construction", "technology", "hospitality-leisure", "financial-services", "banking-sector-x"],
                                    "rationale": "Construction firms, IT providers, hotels and regional banks are listed."},
        "target_countries": {"value": ["US", "CA", "GB", "DE"], "rationale": "United States, Canada, United Kingdom, Germany."},
    },
    "blackcat": {
        "adversary_name": {"value": "BlackCat", "rationale": "Primary name used in the report."},
        "aliases": {"value": ["ALPHV"], "rationale": "The report says the group is also tracked as ALPHV."},
        "sophistication": {"value": "advanced", "rationale": "Custom cross-platform Rust encryptor."},
        "resource_level": {"value": "organization", "rationale": "RaaS program with a core team and affiliates."},
        "motive": {"value": "financial-gain", "rationale": "Ransom payments."},
        "intent": {"value": ["extortion", "information-theft", "disruption-of-service"], "rationale": "Triple extortion including DDoS."},
        "ttps": {"value": ["T1078", "T1190", "T1059.001", "T1562.001", "T1567.002", "T1486", "T1498"],
                 "rationale": "Stolen credentials, exploitation, PowerShell, disabling tools, cloud exfiltration, encryption, DDoS."},
        "cves": {"value": ["CVE-2021-44228"], "rationale": "Named as an access vector."},
        "target_industry_sectors": {"value": ["healthcare", "insurance", "energy", "financial-services"],
                                    "rationale": "Hospitals, insurers, utilities and financial firms."},
        "target_countries": {"value": ["US", "CA"], "rationale": "United States and Canada."},
    },
    "lockbit": {
        "adversary_name": {"value": "LockBit", "rationale": "The report is about LockBit."},
        "aliases": {"value": ["LockBit 2.0", "LockBit 3.0"], "rationale": "Named releases of the same program."},
        "sophistication": {"value": "advanced", "rationale": "Custom exfiltration tool and a bug bounty program."},
        "resource_level": {"value": "organization", "rationale": "Affiliates and paid developers."},
        "motive": {"value": "financial-gain", "rationale": "Ransom demands."},
        "intent": {"value": ["extortion", "information-theft"], "rationale": "Double extortion."},
        "ttps": {"value": ["T1190", "T1566", "T1078", "T1484.001", "T1570", "T1569.002", "T1041", "T1486"],
                 "rationale": "Exploitation, phishing, bought credentials, GPO abuse, PsExec, StealBit exfiltration, encryption."},
        "cves": {"value": ["CVE-2023-4966", "CVE-2021-22986"], "rationale": "Citrix Bleed and F5 BIG-IP are named."},
        "target_industry_sectors": {"value": ["retail", "financial-services", "technology", "construction"],
                                    "rationale": "Retail chains, financial institutions, technology and construction."},
        "target_countries": {"value": ["DE", "FR", "IT", "JP", "BR"], "rationale": "Germany, France, Italy, Japan, Brazil."},
    },
    "phobos": {
        "adversary_name": {"value": "Phobos", "rationale": "Named in the title."},
        "aliases": {"value": [], "rationale": "None given."},
        "sophistication": {"value": "intermediate", "rationale": "Widely available tools."},
        "resource_level": {"value": "organization", "rationale": "Relies on a network of affiliates."},
        "motive": {"value": "financial-gain", "rationale": "Payment for a decryptor."},
        "intent": {"value": ["extortion", "financial-theft"], "rationale": "Victims are pressured into paying."},
        "ttps": {"value": ["T1110", "T1059.003", "T1021", "T1490", "T1486"],
                 "rationale": "RDP brute force, command shell, remote services, recovery inhibition, encryption."},
        "cves": {"value": [], "rationale": "None named."},
        "target_industry_sectors": {"value": ["manufacturing", "automotive"], "rationale": "Manufacturers and automotive suppliers."},
        "target_countries": {"value": ["US"], "rationale": "United States."},
    },
    "play": {
        "adversary_name": {"value": "Play", "rationale": "Named in the title."},
        "aliases": {"value": ["PlayCrypt"], "rationale": "Also written as PlayCrypt."},
        "sophistication": {"value": "intermediate", "rationale": "Off-the-shelf tools plus intermittent encryption."},
        "resource_level": {"value": "team", "rationale": "Small closed crew."},
        "motive": {"value": "financial-gain", "rationale": "Ransom negotiation by email."},
        "intent": {"value": ["extortion", "information-theft"], "rationale": "Threat of data publication."},
        "ttps": {"value": ["T1190", "T1078", "T1087", "T1071", "T1048", "T1486"],
                 "rationale": "VPN exploitation, valid accounts, AdFind discovery, Cobalt Strike, WinSCP, encryption."},
        "cves": {"value": ["CVE-2018-13379"], "rationale": "FortiOS SSL-VPN flaw named."},
        "target_industry_sectors": {"value": ["government-local", "telecommunications", "transportation"],
                                    "rationale": "Municipalities, telecoms and transport operators."},
        "target_countries": {"value": ["DE", "CH", "AR", "NL"], "rationale": "Germany, Switzerland, Argentina, Netherlands."},
    },
    "rhysida": {
        "adversary_name": {"value": "Rhysida", "rationale": "Named in the title."},
        "aliases": {"value": [], "rationale": "None given."},
        "sophistication": {"value": "intermediate", "rationale": "Mostly off-the-shelf tooling."},
        "resource_level": {"value": "team", "rationale": "Appears to be a small team."},
        "motive": {"value": "financial-gain", "rationale": "Data is auctioned when victims do not pay."},
        "intent": {"value": ["extortion", "information-theft"], "rationale": "Exfiltration followed by leak-site auctions."},
        "ttps": {"value": ["T1566", "T1078", "T1133", "T1059.001", "T1021.001", "T1567", "T1486", "T1490"],
                 "rationale": "Phishing, valid accounts, VPN access, PowerShell, RDP, web exfiltration, encryption, shadow copy deletion."},
        "cves": {"value": [], "rationale": "None named."},
        "target_industry_sectors": {"value": ["education", "healthcare", "government-local"],
                                    "rationale": "Schools, universities, hospital trusts and councils."},
        "target_countries": {"value": ["GB", "AU", "ES", "IT", "CL", "PT"],
                             "rationale": "United Kingdom, Australia, Spain, Italy, Chile, Portugal."},
    },
}


def split_reply(text, parts, rng):
    cuts = sorted(rng.sample(range(1, len(text)), parts - 1))
    bounds = [0] + cuts + [len(text)]
    return [text[bounds[i]:bounds[i + 1]] for i in range(parts)]


def build_fixtures(binary, rng):
    out = SAMPLE / "fixtures"
    out.mkdir(exist_ok=True)
    for f in out.glob("*.json"):
        f.unlink()
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([binary, "--quiet", "extract", "--reports", str(SAMPLE / "reports"), "--prompts",
                        str(SAMPLE / "prompts"), "--dump-prompts", tmp], check=True)
        index = json.loads((Path(tmp) / "index.json").read_text())
    for entry in index:
        reply = json.dumps(RESPONSES[entry["report"]], indent=2)
        if entry["report"] == "blackcat":
            reply = "```json\n" + reply + "\n```"
        # Two replies arrive in several length-truncated parts.
        n = {"lockbit": 3, "rhysida": 2}.get(entry["report"], 1)
        texts = split_reply(reply, n, rng) if n > 1 else [reply]
        parts = [{"text": t, "finish_reason": "length_truncated" if i + 1 < n else "complete"}
                 for i, t in enumerate(texts)]
        doc = {"prompt_sha256": entry["prompt_sha256"], "parts": parts}
        (out / f"{entry['report']}.json").write_text(json.dumps(doc, indent=2) + "\n")


def main():
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    rng = random.Random(20240301)
    victims, directory = build_victims(rng)
    (SAMPLE / "victims.jsonl").write_text(victims)
    (SAMPLE / "directory.json").write_text(json.dumps(directory, indent=2, sort_keys=True) + "\n")
    build_fixtures(sys.argv[1], rng)


if __name__ == "__main__":
    main()
