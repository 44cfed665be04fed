using UnityEngine;

public class CombatSystem : MonoBehaviour
{
    [SerializeField] private int maxHealth = 100;
    [SerializeField] private int attackDamage = 10;
    [SerializeField] private float attackRange = 1.2f;
    [SerializeField] private float attackCooldown = 0.5f;
    [SerializeField] private LayerMask targetLayer;

    private int currentHealth;
    private float lastAttackTime;

    private void Awake()
    {
        currentHealth = maxHealth;
    }

    public void Attack()
    {
        if (Time.time - lastAttackTime < attackCooldown)
        {
            return;
        }
        lastAttackTime = Time.time;
        Collider2D[] hits = Physics2D.OverlapCircleAll(transform.position, attackRange, targetLayer);
        foreach (Collider2D hit in hits)
        {
            CombatSystem other = hit.GetComponent<CombatSystem>();
            if (other != null && other != this)
            {
                other.TakeDamage(attackDamage);
            }
        }
    }

    public void TakeDamage(int amount)
    {
        currentHealth -= amount;
        if (currentHealth <= 0)
        {
            Die();
        }
    }

    public void Heal(int amount)
    {
        currentHealth = Mathf.Min(currentHealth + amount, maxHealth);
    }

    public bool IsAlive()
    {
        return currentHealth > 0;
    }

    public int GetHealth()
    {
        return currentHealth;
    }

    private void Die()
    {
        Debug.Log(gameObject.name + " was defeated");
        gameObject.SetActive(false);
    }
}
