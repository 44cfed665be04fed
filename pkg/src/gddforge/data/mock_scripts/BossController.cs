using UnityEngine;

public class BossController : MonoBehaviour
{
    [SerializeField] private int phaseCount = 3;
    [SerializeField] private float enrageThreshold = 0.3f;
    [SerializeField] private float specialAttackInterval = 8f;

    private EnemyAI baseAI;
    private CombatSystem combat;
    private int currentPhase = 1;
    private float lastSpecialTime;

    private void Awake()
    {
        baseAI = GetComponent<EnemyAI>();
        combat = GetComponent<CombatSystem>();
    }

    private void Update()
    {
        UpdatePhase();
        if (Time.time - lastSpecialTime > specialAttackInterval)
        {
            SpecialAttack();
        }
    }

    public void UpdatePhase()
    {
        if (combat == null)
        {
            return;
        }
        float healthFraction = combat.GetHealth() / 100f;
        int phase = Mathf.Clamp(phaseCount - Mathf.FloorToInt(healthFraction * phaseCount), 1, phaseCount);
        if (phase != currentPhase)
        {
            currentPhase = phase;
            OnPhaseChanged();
        }
    }

    public void SpecialAttack()
    {
        lastSpecialTime = Time.time;
        if (baseAI != null && baseAI.DistanceToPlayer() < 10f)
        {
            combat.Attack();
        }
    }

    public bool IsEnraged()
    {
        return combat != null && combat.GetHealth() < enrageThreshold * 100f;
    }

    public int GetPhase()
    {
        return currentPhase;
    }

    private void OnPhaseChanged()
    {
        Debug.Log("Boss entered phase " + currentPhase);
    }
}
